"""Independent certificate checkers.

Nothing here calls the solvers, the closure or the table helpers used to
produce witnesses: every check is re-derived from the raw data fields
with plain loops, so a bug in a searcher cannot vouch for itself.
"""

from __future__ import annotations

from collections import deque
from itertools import product
from typing import Mapping, Sequence

# -- graphs ---------------------------------------------------------------------------


def _adjacent(edges) -> set[tuple[int, int]]:
    out = set()
    for u, v in edges:
        out.add((u, v))
        out.add((v, u))
    return out


def check_hom(source, target, hom: Mapping[int, int]) -> bool:
    if sorted(hom) != list(range(source.n)):
        return False
    if any(not isinstance(w, int) or not 0 <= w < target.n for w in hom.values()):
        return False
    adj = _adjacent(target.edges)
    return all((hom[u], hom[v]) in adj for u, v in source.edges)


def check_coloring(g, coloring: Mapping[int, int]) -> bool:
    if sorted(coloring) != list(range(g.n)) or any(c not in (0, 1, 2) for c in coloring.values()):
        return False
    return all(coloring[u] != coloring[v] for u, v in g.edges)


def naive_coloring(n: int, edges, pins: Mapping[int, int] | None = None) -> dict[int, int] | None:
    """Chronological backtracking in vertex order; loops are never colourable."""
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if u == v:
            return None
        nbrs[u].add(v)
        nbrs[v].add(u)
    pins = dict(pins or {})
    col: dict[int, int] = {}

    def rec(v: int) -> bool:
        if v == n:
            return True
        for c in ([pins[v]] if v in pins else (0, 1, 2)):
            if all(col.get(w) != c for w in nbrs[v]):
                col[v] = c
                if rec(v + 1):
                    return True
                del col[v]
        return False

    return dict(col) if rec(0) else None


def check_critical(g, edge: tuple[int, int]) -> bool:
    e = (min(edge), max(edge))
    if e not in {(min(u, v), max(u, v)) for u, v in g.edges}:
        return False
    rest = [(u, v) for u, v in g.edges if (min(u, v), max(u, v)) != e]
    return naive_coloring(g.n, g.edges) is None and naive_coloring(g.n, rest) is not None


def gadget_counts(n_vertices: int, edges, d: tuple[int, int], boundary: Sequence[int]) -> dict[str, object]:
    """Recount the boundary behaviour of a gadget from scratch."""
    x, x_, y, y_ = boundary
    dd = (min(d), max(d))
    without_d = [(u, v) for u, v in edges if (min(u, v), max(u, v)) != dd]
    extend = set()
    eqeq = 0
    for b in product(range(3), repeat=4):
        pins = dict(zip(boundary, b))
        if len(pins) < 4:
            continue
        if naive_coloring(n_vertices, edges, pins) is not None:
            extend.add(b)
        if b[0] == b[1] and b[2] == b[3] and naive_coloring(n_vertices, without_d, pins) is not None:
            eqeq += 1
    xor = {b for b in product(range(3), repeat=4) if (b[0] != b[1]) != (b[2] != b[3])}
    return {"extendable": len(extend), "xor_exact": extend == xor, "eqeq_extendable": eqeq}


# -- conditions -----------------------------------------------------------------------


def check_projection_assignment(cond, assign: Mapping[str, int]) -> bool:
    """Instantiate projections on {0,1} and test every identity at every point."""
    arity = {s.id: s.arity for s in cond.symbols}
    if set(assign) != set(arity) or any(not 0 <= assign[s] < arity[s] for s in arity):
        return False
    for ident in cond.identities:
        for xs in product((0, 1), repeat=ident.r):
            left = xs[ident.lhs.coords[assign[ident.lhs.sym]]]
            right = xs[ident.rhs.coords[assign[ident.rhs.sym]]]
            if left != right:
                return False
    return True


def _consequence(source, r: int, a: tuple, b: tuple) -> bool:
    """Breadth-first search over formal minors joined by instances of source identities."""
    if a == b:
        return True
    rules = []
    for ident in source.identities:
        rules.append((ident.r, ident.lhs, ident.rhs))
        rules.append((ident.r, ident.rhs, ident.lhs))
    seen = {a}
    queue = deque([a])
    while queue:
        sym, tau = queue.popleft()
        for rr, one, other in rules:
            if one.sym != sym:
                continue
            fixed: dict[int, int] = {}
            ok = True
            for var, val in zip(one.coords, tau):
                if fixed.setdefault(var, val) != val:
                    ok = False
                    break
            if not ok:
                continue
            loose = [v for v in range(rr) if v not in fixed]
            for vals in product(range(r), repeat=len(loose)):
                full = dict(fixed)
                full.update(zip(loose, vals))
                nxt = (other.sym, tuple(full[c] for c in other.coords))
                if nxt == b:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return False


def check_derivation(source, target, mapping: Mapping[str, tuple[str, Sequence[int]]]) -> bool:
    """Every translated target identity must follow from the source."""
    src_arity = {s.id: s.arity for s in source.symbols}
    for s in target.symbols:
        if s.id not in mapping:
            return False
        name, mu = mapping[s.id]
        if src_arity.get(name) != len(mu) or any(not 0 <= k < s.arity for k in mu):
            return False

    def translate(term):
        name, mu = mapping[term.sym]
        return name, tuple(term.coords[k] for k in mu)

    return all(_consequence(source, i.r, translate(i.lhs), translate(i.rhs)) for i in target.identities)


# -- operations -----------------------------------------------------------------------


def _apply(values: Sequence[int], size: int, args: Sequence[int]) -> int:
    k = 0
    for a in args:
        k = k * size + a
    return values[k]


def check_polymorphism(b, arity: int, values: Sequence[int]) -> bool:
    if len(values) != b.size ** arity or any(not 0 <= v < b.size for v in values):
        return False
    for rel in b.relations:
        rows = list(rel.tuples)
        for choice in product(rows, repeat=arity):
            image = tuple(_apply(values, b.size, [t[j] for t in choice]) for j in range(rel.arity))
            if image not in rel.tuples:
                return False
    return True


def check_witness(b, cond, tables: Mapping[str, Sequence[int]], subset: Sequence[int] | None = None) -> bool:
    """Every table is a polymorphism and every identity holds on the quantified range."""
    arity = {s.id: s.arity for s in cond.symbols}
    if set(tables) != set(arity):
        return False
    if not all(check_polymorphism(b, arity[s], tables[s]) for s in arity):
        return False
    rng = range(b.size) if subset is None else list(subset)
    for ident in cond.identities:
        f, g = tables[ident.lhs.sym], tables[ident.rhs.sym]
        for xs in product(rng, repeat=ident.r):
            if _apply(f, b.size, [xs[c] for c in ident.lhs.coords]) != _apply(g, b.size, [xs[c] for c in ident.rhs.coords]):
                return False
    return True


def transport_tables(size: int, target, mapping, tables: Mapping[str, Sequence[int]]) -> dict[str, list[int]]:
    out = {}
    for s in target.symbols:
        name, mu = mapping[s.id]
        src = tables[name]
        out[s.id] = [_apply(src, size, [xs[k] for k in mu]) for xs in product(range(size), repeat=s.arity)]
    return out


def check_transport(b, source, target, mapping, tables: Mapping[str, Sequence[int]]) -> bool:
    if not check_witness(b, source, tables):
        return False
    return check_witness(b, target, transport_tables(b.size, target, mapping, tables))


# -- exact growth inequality ------------------------------------------------------------


def iroot_ceil(k: int, m: int) -> int:
    """ceil(k^(1/m)) by bisection on integers."""
    if k <= 1:
        return k
    lo, hi = 1, 1 << (k.bit_length() // m + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** m >= k:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _norm(m: int, x: int, p: int, up: bool) -> tuple[int, int]:
    extra = m.bit_length() - p
    if extra <= 0:
        return m, x
    q = m >> extra
    if up and q << extra != m:
        q += 1
    return q, x + extra


def _pow(base: int, e: int, p: int, up: bool) -> tuple[int, int]:
    """Bound on base^e as mantissa * 2^exponent with p-bit mantissas."""
    acc, sq = (1, 0), _norm(base, 0, p, up)
    while e:
        if e & 1:
            acc = _norm(acc[0] * sq[0], acc[1] + sq[1], p, up)
        e >>= 1
        if e:
            sq = _norm(sq[0] * sq[0], 2 * sq[1], p, up)
    return acc


def _sum(parts: list[tuple[int, int]], p: int, up: bool) -> tuple[int, int]:
    top = max(x + m.bit_length() for m, x in parts)
    base = top - 2 * p
    total = 0
    for m, x in parts:
        if x >= base:
            total += m << (x - base)
        else:
            shifted = m >> (base - x)
            total += shifted + (1 if up and shifted << (base - x) != m else 0)
    return _norm(total, base, p, up)


def _cmp(a: tuple[int, int], b: tuple[int, int]) -> int:
    la, lb = a[0].bit_length() + a[1], b[0].bit_length() + b[1]
    if a[0] == 0 or b[0] == 0:
        return (a[0] > 0) - (b[0] > 0)
    if la != lb:
        return (la > lb) - (la < lb)
    shift = a[1] - b[1]
    x, y = (a[0] << shift, b[0]) if shift >= 0 else (a[0], b[0] << -shift)
    return (x > y) - (x < y)


def less_than(lhs: Sequence[tuple[int, int, int]], rhs: Sequence[tuple[int, int, int]]) -> bool | None:
    """Decide sum coef*base^exp (lhs) < same (rhs) without logarithms; None if undecided."""
    small = max(e * b.bit_length() + c.bit_length() for c, b, e in list(lhs) + list(rhs)) <= 1 << 22
    if small:
        return sum(c * b ** e for c, b, e in lhs) < sum(c * b ** e for c, b, e in rhs)
    for p in (96, 384, 1536, 6144):
        def bound(terms, up):
            parts = []
            for c, b, e in terms:
                m, x = _pow(b, e, p, up)
                parts.append(_norm(m * c, x, p, up))
            return _sum(parts, p, up)
        if _cmp(bound(lhs, True), bound(rhs, False)) < 0:
            return True
        if _cmp(bound(lhs, False), bound(rhs, True)) >= 0:
            return False
    return None


def check_growth(m: int, sizes: Sequence[int], alpha: Sequence[int], thresholds: Sequence[int]) -> bool:
    """alpha(1)=1, alpha(n+1)=k_n+1 > alpha(n)+1, and the defining inequality at each k_n."""
    if not alpha or alpha[0] != 1 or len(alpha) != len(thresholds) + 1:
        return False
    for n, k in enumerate(thresholds, start=1):
        if k <= alpha[n - 1] or alpha[n] != k + 1:
            return False
        lhs = [(1, k, alpha[i] * sizes[i]) for i in range(n)]
        if less_than(lhs, [(1, 2, iroot_ceil(k, m))]) is not True:
            return False
    return True
