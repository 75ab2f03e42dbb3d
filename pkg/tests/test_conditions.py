import itertools

import pytest
from hypothesis import given, settings, strategies as st

from h1wb import checks
from h1wb.clones import k3_structure, satisfies, structure, transport, z3_affine
from h1wb.conditions import (
    LEFT,
    SPADE_ROWS,
    H1Condition,
    Identity,
    MinorDerivation,
    Symbol,
    Term,
    builtin_condition,
    check_derivation,
    derive_from_hom,
    derive_glue,
    entails_identity,
    find_derivation,
    identity,
    is_trivial,
    qnu,
    refute_implication,
    same_up_to_renaming,
    sigma_of_graph,
    siggers,
)
from h1wb.errors import BadArity, GlueUndefined, NotAHomomorphism, UnknownName
from h1wb.graphs import Graph, MarkedGraph, all_graphs, complete, cycle, glue, hom_search, looped_vertex

K3, K4, C5 = complete(3), complete(4), cycle(5)


def test_sigma_counts():
    c = sigma_of_graph(K3)
    assert sorted(s.arity for s in c.symbols) == [3] * 3 + [6] * 6
    assert len(c.identities) == 12
    c = sigma_of_graph(K4)
    assert len(c.symbols) == 16 and len(c.identities) == 24


def test_sigma_of_loop_is_siggers():
    loop = sigma_of_graph(looped_vertex())
    assert sorted(s.arity for s in loop.symbols) == [3, 6]
    # one 6-ary symbol whose two pattern minors are both f_v: Siggers up to naming
    assert find_derivation(siggers(), loop) is not None
    assert find_derivation(loop, siggers()) is not None


def test_builtins():
    s = builtin_condition("siggers")
    assert len(s.symbols) == 1 and len(s.identities) == 1 and s.identities[0].r == 3
    q = builtin_condition("qnu", 3)
    assert len(q.symbols) == 1 and len(q.identities) == 3
    assert all(i.r == 2 for i in q.identities)
    with pytest.raises(BadArity):
        builtin_condition("qnu", 2)
    with pytest.raises(UnknownName):
        builtin_condition("maltsev")


def test_trivial_examples():
    a = is_trivial(sigma_of_graph(K3))
    assert a is not None
    assert [a[f"f{v}"] for v in range(3)] == [0, 1, 2]
    assert is_trivial(sigma_of_graph(K4)) is None
    assert is_trivial(siggers()) is None


def brute_trivial(c):
    syms = list(c.symbols)
    for choice in itertools.product(*[range(s.arity) for s in syms]):
        a = {s.id: k for s, k in zip(syms, choice)}
        if all(i.lhs.coords[a[i.lhs.sym]] == i.rhs.coords[a[i.rhs.sym]] for i in c.identities):
            return a
    return None


@st.composite
def conditions(draw, max_symbols=4, max_arity=6, max_identities=5):
    syms = [Symbol(f"s{k}", draw(st.integers(1, max_arity))) for k in range(draw(st.integers(1, max_symbols)))]
    idents = []
    for _ in range(draw(st.integers(0, max_identities))):
        r = draw(st.integers(1, 3))
        a, b = draw(st.sampled_from(syms)), draw(st.sampled_from(syms))
        lc = tuple(draw(st.lists(st.integers(0, r - 1), min_size=a.arity, max_size=a.arity)))
        rc = tuple(draw(st.lists(st.integers(0, r - 1), min_size=b.arity, max_size=b.arity)))
        idents.append(Identity(r, Term(a.id, lc), Term(b.id, rc)))
    return H1Condition(tuple(syms), tuple(idents))


@settings(max_examples=150, deadline=None)
@given(conditions())
def test_trivial_matches_brute_force(c):
    got = is_trivial(c)
    assert got == brute_trivial(c)  # both pick the lexicographically least choice
    if got is not None:
        assert checks.check_projection_assignment(c, got)


def test_trivial_iff_colorable_small():
    for n in range(1, 6):
        for g in all_graphs(n):
            assert (is_trivial(sigma_of_graph(g)) is not None) == (hom_search(g, K3) is not None)


def test_entails_reflexive_and_commutative():
    comm = H1Condition((Symbol("f", 2),), (identity(2, "f", (0, 1), "f", (1, 0)),))
    assert entails_identity(comm, identity(1, "f", (0, 0), "f", (0, 0)))
    assert entails_identity(comm, identity(3, "f", (2, 0), "f", (0, 2)))
    assert not entails_identity(comm, identity(2, "f", (0, 1), "f", (0, 0)))


@settings(max_examples=60, deadline=None)
@given(conditions(max_symbols=2, max_arity=3, max_identities=3), st.data())
def test_entails_matches_bfs_and_is_monotone(c, data):
    sym = data.draw(st.sampled_from(c.symbols))
    other = data.draw(st.sampled_from(c.symbols))
    r = data.draw(st.integers(1, 3))
    lc = tuple(data.draw(st.lists(st.integers(0, r - 1), min_size=sym.arity, max_size=sym.arity)))
    rc = tuple(data.draw(st.lists(st.integers(0, r - 1), min_size=other.arity, max_size=other.arity)))
    target = Identity(r, Term(sym.id, lc), Term(other.id, rc))
    got = entails_identity(c, target)
    assert got == checks._consequence(c, r, (sym.id, lc), (other.id, rc))
    if got:
        extra = H1Condition(c.symbols, c.identities + (identity(2, sym.id, [0] * sym.arity, sym.id, [1] * sym.arity),))
        assert entails_identity(extra, target)


def test_derive_from_hom():
    inc = {0: 0, 1: 1, 2: 2}
    d = derive_from_hom(K3, K4, inc)
    assert check_derivation(sigma_of_graph(K4), sigma_of_graph(K3), d)
    ident = derive_from_hom(K3, K3, inc)
    assert all(src == tgt and mu == tuple(range(len(mu))) for tgt, (src, mu) in ident.mapping)
    col = hom_search(C5, K3)
    d = derive_from_hom(C5, K3, col)
    assert check_derivation(sigma_of_graph(K3), sigma_of_graph(C5), d)
    assert checks.check_derivation(sigma_of_graph(K3), sigma_of_graph(C5), d.as_dict())
    with pytest.raises(NotAHomomorphism):
        derive_from_hom(K4, K3, {0: 0, 1: 1, 2: 2, 3: 0})


def test_edge_orientations_are_interderivable():
    g1 = Graph.from_edges(2, [(0, 1)])
    flip = {0: 1, 1: 0}
    d = derive_from_hom(g1, g1, flip)
    assert check_derivation(sigma_of_graph(g1), sigma_of_graph(g1), d)


def test_spade_rows_cover_all_pairs():
    for a, b in itertools.permutations(SPADE_ROWS, 2):
        pairs = {(a[k], b[k]) for k in range(6)}
        assert pairs == {(p, q) for p in range(3) for q in range(3) if p != q}


def test_derive_glue_k4_k4():
    k4 = MarkedGraph(K4, (0, 1))
    from_g, from_h = derive_glue(k4, k4)
    w = glue(k4, k4)
    tgt = sigma_of_graph(w.graph)
    assert check_derivation(sigma_of_graph(K4), tgt, from_g)
    assert check_derivation(sigma_of_graph(K4), tgt, from_h)
    # f_x is the first spade minor of g_e
    assert from_g.as_dict()["f0"] == ("g0_1", LEFT)
    with pytest.raises(GlueUndefined):
        derive_glue(MarkedGraph(K3, (0, 1)), k4)


def test_transport_through_glue_on_a_real_clone():
    # ({0,1}, <=) has min as a polymorphism, so every Sigma_G holds there
    le = structure(2, [("E", 2, [(0, 0), (0, 1), (1, 1)])])
    k4 = MarkedGraph(K4, (0, 1))
    src = sigma_of_graph(K4)
    w = satisfies(le, src)
    assert w is not None
    tgt = sigma_of_graph(glue(k4, k4).graph)
    for d in derive_glue(k4, k4):
        moved = transport(d, w, tgt)
        assert moved.is_valid(le)
        assert checks.check_transport(le, src, tgt, d.as_dict(), {k: t.values for k, t in w.tables.items()})


def test_find_derivation_examples():
    s = sigma_of_graph(K4)
    d = find_derivation(s, s)
    assert d is not None and check_derivation(s, s, d)
    sub = sigma_of_graph(K3)
    d = find_derivation(s, sub)
    assert d is not None and check_derivation(s, sub, d)
    d = find_derivation(siggers(), s)
    assert d is not None and checks.check_derivation(siggers(), s, d.as_dict())


def test_find_derivation_fails_when_impossible():
    # K4 does not map to K3, and Pol(K3) separates them
    assert find_derivation(sigma_of_graph(K3), sigma_of_graph(K4)) is None


def test_refute_examples():
    empty = H1Condition((), ())
    assert refute_implication(empty, siggers(), [k3_structure()]) == k3_structure()
    assert refute_implication(siggers(), siggers(), [k3_structure(), z3_affine()]) is None
    assert refute_implication(siggers(), qnu(3), [z3_affine()]) == z3_affine()


def test_check_derivation_rejects_wrong_mapping():
    free = H1Condition((Symbol("f", 2),), ())
    comm = H1Condition((Symbol("f", 2),), (identity(2, "f", (0, 1), "f", (1, 0)),))
    d = MinorDerivation.of({"f": ("f", (0, 1))})
    assert not check_derivation(free, comm, d)
    assert not checks.check_derivation(free, comm, d.as_dict())
    assert check_derivation(comm, comm, d)
    assert not check_derivation(siggers(), sigma_of_graph(K4), MinorDerivation.of({}))


def test_same_up_to_renaming():
    a = H1Condition((Symbol("f", 2),), (identity(2, "f", (0, 1), "f", (1, 0)),))
    b = H1Condition((Symbol("g", 2),), (identity(2, "g", (1, 0), "g", (0, 1)),))
    assert same_up_to_renaming(a, b)
    assert not same_up_to_renaming(a, qnu(3))
