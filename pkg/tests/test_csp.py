import itertools

from hypothesis import given, settings, strategies as st

from h1wb.csp import CSP, ArrayCSP, bits


@st.composite
def instances(draw, max_vars=5, max_dom=3):
    n = draw(st.integers(1, max_vars))
    d = draw(st.integers(1, max_dom))
    cons = []
    for _ in range(draw(st.integers(0, 6))):
        k = draw(st.integers(1, min(3, n)))
        scope = draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k))
        rows = list(itertools.product(range(d), repeat=k))
        cons.append((tuple(scope), draw(st.lists(st.sampled_from(rows), unique=True))))
    return n, d, cons


def brute(n, d, cons):
    return [list(a) for a in itertools.product(range(d), repeat=n)
            if all(tuple(a[v] for v in scope) in set(map(tuple, allowed)) for scope, allowed in cons)]


def build(kind, n, d, cons):
    csp = CSP([d] * n) if kind == "plain" else ArrayCSP(n, d)
    for scope, allowed in cons:
        csp.add(scope, allowed)
    return csp


@settings(max_examples=150, deadline=None)
@given(instances(), st.sampled_from(["plain", "array"]))
def test_solve_is_lex_least(inst, kind):
    n, d, cons = inst
    expected = brute(n, d, cons)
    got = build(kind, n, d, cons).solve()
    assert got == (expected[0] if expected else None)


@settings(max_examples=80, deadline=None)
@given(instances(max_vars=4), st.sampled_from(["plain", "array"]))
def test_all_solutions_in_order(inst, kind):
    n, d, cons = inst
    assert list(build(kind, n, d, cons).solutions()) == brute(n, d, cons)


@settings(max_examples=80, deadline=None)
@given(instances(), st.data())
def test_pins_and_unordered_mode(inst, data):
    n, d, cons = inst
    v = data.draw(st.integers(0, n - 1))
    val = data.draw(st.integers(0, d - 1))
    expected = [s for s in brute(n, d, cons) if s[v] == val]
    for kind in ("plain", "array"):
        got = build(kind, n, d, cons).solve({v: val}, lex=False)
        assert (got is None) == (not expected)
        if got is not None:
            assert got in expected


def test_bits():
    assert bits(0) == []
    assert bits(0b10110) == [1, 2, 4]


def test_copy_is_independent():
    csp = CSP([2, 2])
    csp.add((0, 1), [(0, 1), (1, 0)])
    other = csp.copy()
    other.restrict(0, [1])
    assert csp.solve() == [0, 1]
    assert other.solve() == [1, 0]
