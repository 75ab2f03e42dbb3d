"""Finite structures, operation tables and polymorphism witnesses.

A condition holds in Pol(B) iff its indicator instance maps to B.  The
instance has one variable per class of formal elements ``(symbol, tuple)``
after gluing along the identities, and one constraint per symbol, relation
and choice of relation tuples, asking the symbol to preserve the relation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .conditions import (
    LEFT,
    RIGHT,
    H1Condition,
    MinorDerivation,
    Symbol,
    qnu,
    sigma_of_graph,
    siggers,
    vertex_symbol,
)
from .csp import ArrayCSP
from .errors import (
    CapExceeded,
    InputError,
    InternalError,
    NotATriangle,
    NotAWitness,
    SizeLimit,
)
from .graphs import Graph, complete, is_three_colorable, looped_vertex
from .unionfind import UnionFind

CHUNK = 1 << 16


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    tuples: frozenset

    def __post_init__(self):
        rows = frozenset(tuple(int(a) for a in t) for t in self.tuples)
        if any(len(t) != self.arity for t in rows):
            raise InputError(f"relation {self.name} has a tuple of the wrong length")
        object.__setattr__(self, "tuples", rows)

    def array(self) -> np.ndarray:
        return np.array(sorted(self.tuples), dtype=np.int64).reshape(len(self.tuples), self.arity)


@dataclass(frozen=True)
class FiniteStructure:
    size: int
    relations: tuple[Relation, ...]

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        if self.size < 0:
            raise InputError("negative domain size")
        for rel in self.relations:
            if any(a < 0 or a >= self.size for t in rel.tuples for a in t):
                raise InputError(f"relation {rel.name} leaves the domain 0..{self.size - 1}")

    def relation(self, name: str) -> Relation:
        for rel in self.relations:
            if rel.name == name:
                return rel
        raise KeyError(name)


def structure(size: int, relations: Iterable[tuple[str, int, Iterable[Sequence[int]]]]) -> FiniteStructure:
    return FiniteStructure(size, tuple(Relation(name, arity, frozenset(map(tuple, ts))) for name, arity, ts in relations))


def structure_from_graph(g: Graph) -> FiniteStructure:
    return structure(g.n, [("E", 2, g.ordered_edges())])


def looped_vertex_structure() -> FiniteStructure:
    return structure_from_graph(looped_vertex())


def k3_structure() -> FiniteStructure:
    return structure_from_graph(complete(3))


def z3_affine() -> FiniteStructure:
    """({0,1,2}; a+b+c = 1 mod 3).  No constant preserves it."""
    return structure(3, [("R", 3, [t for t in product(range(3), repeat=3) if sum(t) % 3 == 1])])


def _weights(d: int, n: int) -> np.ndarray:
    return d ** np.arange(n - 1, -1, -1, dtype=np.int64)


def _digits(d: int, n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows ``start..stop`` of ``product(range(d), repeat=n)`` as an array."""
    stop = d ** n if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    return np.stack([(idx // d ** (n - 1 - k)) % d for k in range(n)], axis=1).reshape(len(idx), n)


def _row_choices(rel: Relation, n: int) -> Iterator[np.ndarray]:
    """Every choice of ``n`` relation tuples, as arrays of shape (rows, n, arity), in chunks."""
    table = rel.array()
    t = len(table)
    if t == 0:
        return
    total = t ** n
    for lo in range(0, total, CHUNK):
        yield table[_digits(t, n, lo, min(total, lo + CHUNK))]


@dataclass(frozen=True)
class OperationTable:
    """An n-ary operation on {0..size-1}; values in lexicographic argument order."""

    size: int
    arity: int
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) != self.size ** self.arity:
            raise InputError("operation table has the wrong length")
        if any(v < 0 or v >= self.size for v in self.values):
            raise InputError("operation table leaves the domain")

    def __call__(self, *args: int) -> int:
        k = 0
        for a in args:
            k = k * self.size + a
        return self.values[k]

    @classmethod
    def projection(cls, size: int, arity: int, i: int) -> "OperationTable":
        return cls(size, arity, tuple(_digits(size, arity)[:, i].tolist()) if size else ())

    @classmethod
    def identity(cls, size: int) -> "OperationTable":
        return cls.projection(size, 1, 0)

    def minor(self, mu: Sequence[int], arity: int) -> "OperationTable":
        """``t(x_0..x_{arity-1}) = self(x_mu[0], ..)``."""
        args = _digits(self.size, arity)[:, list(mu)] @ _weights(self.size, self.arity)
        return OperationTable(self.size, arity, tuple(np.asarray(self.values)[args].tolist()))

    def compose_unary(self, e: "OperationTable") -> "OperationTable":
        return OperationTable(self.size, self.arity, tuple(e.values[v] for v in self.values))

    def is_polymorphism(self, b: FiniteStructure) -> bool:
        vals = np.asarray(self.values, dtype=np.int64)
        w = _weights(b.size, self.arity)
        for rel in b.relations:
            allowed = {sum(a * b.size ** (rel.arity - 1 - j) for j, a in enumerate(t)) for t in rel.tuples}
            allowed = np.fromiter(allowed, dtype=np.int64, count=len(allowed))
            wk = _weights(b.size, rel.arity)
            for rows in _row_choices(rel, self.arity):
                out = vals[np.einsum("rnk,n->rk", rows, w)] @ wk
                if not np.isin(out, allowed).all():
                    return False
        return True


@dataclass
class WitnessAssignment:
    condition: H1Condition
    tables: dict[str, OperationTable]
    subset: tuple[int, ...] | None = None

    def holds(self) -> bool:
        """Pointwise check of every identity over the quantified range."""
        if not self.tables:
            return not self.condition.identities
        d = next(iter(self.tables.values())).size
        rng = range(d) if self.subset is None else self.subset
        for ident in self.condition.identities:
            f, g = self.tables[ident.lhs.sym], self.tables[ident.rhs.sym]
            for xs in product(rng, repeat=ident.r):
                if f(*(xs[c] for c in ident.lhs.coords)) != g(*(xs[c] for c in ident.rhs.coords)):
                    return False
        return True

    def is_valid(self, b: FiniteStructure) -> bool:
        if set(self.tables) != set(self.condition.symbol_ids()):
            return False
        for s in self.condition.symbols:
            t = self.tables[s.id]
            if t.size != b.size or t.arity != s.arity or not t.is_polymorphism(b):
                return False
        return self.holds()


def transport(deriv: MinorDerivation, w: WitnessAssignment, target: H1Condition) -> WitnessAssignment:
    """Tables for ``target`` obtained by taking the minors the derivation names."""
    mapping = deriv.as_dict()
    tables = {s.id: w.tables[mapping[s.id][0]].minor(mapping[s.id][1], s.arity) for s in target.symbols}
    return WitnessAssignment(target, tables, w.subset)


# -- indicator ------------------------------------------------------------------------


@dataclass
class IndicatorInstance:
    structure: FiniteStructure
    condition: H1Condition
    subset: tuple[int, ...] | None
    offsets: dict[str, int]
    labels: np.ndarray  # formal element -> class
    class_count: int
    # (relation index, distinct class scopes)
    constraints: list[tuple[int, np.ndarray]] = field(default_factory=list)

    @property
    def element_count(self) -> int:
        return len(self.labels)

    def element(self, sym: str, args: Sequence[int]) -> int:
        k = 0
        for a in args:
            k = k * self.structure.size + a
        return self.offsets[sym] + k

    def class_of(self, sym: str, args: Sequence[int]) -> int:
        return int(self.labels[self.element(sym, args)])

    def to_csp(self) -> ArrayCSP:
        csp = ArrayCSP(self.class_count, self.structure.size)
        for ri, scopes in self.constraints:
            rel = self.structure.relations[ri]
            csp.add_rows(scopes, csp.relation(rel.tuples, rel.arity))
        return csp

    def tables(self, sol: Sequence[int]) -> dict[str, OperationTable]:
        values = np.asarray(sol, dtype=np.int64)[self.labels]
        d = self.structure.size
        return {s.id: OperationTable(d, s.arity, tuple(values[self.offsets[s.id]:self.offsets[s.id] + d ** s.arity].tolist()))
                for s in self.condition.symbols}


def build_indicator(b: FiniteStructure, c: H1Condition, s: Iterable[int] | None = None,
                    max_elements: int = 5_000_000) -> IndicatorInstance:
    d = b.size
    subset = None if s is None else tuple(sorted(set(int(a) for a in s)))
    if subset is not None and any(a < 0 or a >= d for a in subset):
        raise InputError("subset leaves the domain")
    offsets, total = {}, 0
    for sym in c.symbols:
        offsets[sym.id] = total
        total += d ** sym.arity
    if total > max_elements:
        raise SizeLimit(f"indicator would have {total} formal elements")
    uf = UnionFind(total)
    rng = list(range(d)) if subset is None else list(subset)
    for ident in c.identities:
        if not rng:
            break
        assign = np.array(list(product(rng, repeat=ident.r)), dtype=np.int64).reshape(-1, ident.r)
        lhs = offsets[ident.lhs.sym] + assign[:, list(ident.lhs.coords)] @ _weights(d, len(ident.lhs.coords))
        rhs = offsets[ident.rhs.sym] + assign[:, list(ident.rhs.coords)] @ _weights(d, len(ident.rhs.coords))
        for x, y in zip(lhs.tolist(), rhs.tolist()):
            uf.union(x, y)
    # roots are least members, so sorted order numbers classes by least member
    _, labels = np.unique(uf.roots(), return_inverse=True)
    labels = labels.astype(np.int64)
    inst = IndicatorInstance(b, c, subset, offsets, labels, int(labels.max()) + 1 if total else 0)
    for ri, rel in enumerate(b.relations):
        for sym in c.symbols:
            w = _weights(d, sym.arity)
            parts = [labels[offsets[sym.id] + np.einsum("rnk,n->rk", rows, w)] for rows in _row_choices(rel, sym.arity)]
            if parts:
                inst.constraints.append((ri, np.unique(np.concatenate(parts), axis=0)))
    return inst


def solve_indicator(inst: IndicatorInstance) -> WitnessAssignment | None:
    """Lexicographically least witness, or None."""
    sol = inst.to_csp().solve()
    if sol is None:
        return None
    return WitnessAssignment(inst.condition, inst.tables(sol), inst.subset)


def satisfies(b: FiniteStructure, c: H1Condition, s: Iterable[int] | None = None) -> WitnessAssignment | None:
    return solve_indicator(build_indicator(b, c, s))


def find_siggers(b: FiniteStructure) -> WitnessAssignment | None:
    return satisfies(b, siggers())


def find_qnu(b: FiniteStructure, n: int) -> WitnessAssignment | None:
    return satisfies(b, qnu(n))


def hom_from_sigma_witness(g: Graph, h: Graph, w: WitnessAssignment, triangle: Sequence[int]) -> dict[int, int]:
    """The homomorphism ``v -> f_v(v1, v2, v3)`` read off a witness for Sigma_g in Pol(h)."""
    v1, v2, v3 = triangle
    if len({v1, v2, v3}) != 3 or not all(h.has_edge(a, b) for a, b in ((v1, v2), (v2, v3), (v1, v3))):
        raise NotATriangle(f"{tuple(triangle)} does not span a triangle")
    if w.subset is not None or not WitnessAssignment(sigma_of_graph(g), w.tables).is_valid(structure_from_graph(h)):
        raise NotAWitness("tables do not satisfy the condition of the source graph in Pol(h)")
    hom = {v: w.tables[vertex_symbol(v)](v1, v2, v3) for v in range(g.n)}
    if not all(h.has_edge(hom[u], hom[v]) for u, v in g.edges):
        raise InternalError("witness produced a non-homomorphism")
    return hom


# -- polymorphism enumeration ------------------------------------------------------------


class Polymorphisms(NamedTuple):
    tables: list[OperationTable]
    truncated: bool


def _free(arity: int, name: str = "p") -> H1Condition:
    return H1Condition((Symbol(name, arity),), ())


def enumerate_polymorphisms(b: FiniteStructure, arity: int, cap: int | None = None) -> Polymorphisms:
    """Polymorphisms of one arity in lexicographic table order, at most ``cap`` of them."""
    inst = build_indicator(b, _free(arity))
    out = []
    for sol in inst.to_csp().solutions():
        if cap is not None and len(out) == cap:
            return Polymorphisms(out, True)
        out.append(inst.tables(sol)["p"])
    return Polymorphisms(out, False)


def _pattern_classes(inst: IndicatorInstance, sym: str) -> tuple[list[int], list[int]]:
    d = inst.structure.size
    triples = list(product(range(d), repeat=3))
    left = [inst.class_of(sym, [xyz[c] for c in LEFT]) for xyz in triples]
    right = [inst.class_of(sym, [xyz[c] for c in RIGHT]) for xyz in triples]
    return left, right


@dataclass
class FGraph:
    graph: Graph
    tables: list[OperationTable]
    # (i, j) -> 6-ary g with g(LEFT) = tables[i] and g(RIGHT) = tables[j]
    witnesses: dict[tuple[int, int], OperationTable]

    def edge_witness(self, i: int, j: int) -> WitnessAssignment:
        """The edge's tables as a witness for the condition of one edge (or one loop)."""
        g = self.witnesses.get((i, j))
        if g is None:
            g = self.witnesses[(j, i)].minor((1, 0, 3, 2, 5, 4), 6)
        if i == j:
            return WitnessAssignment(sigma_of_graph(looped_vertex()), {"f0": self.tables[i], "g0_0": g})
        swapped = g.minor((1, 0, 3, 2, 5, 4), 6)
        return WitnessAssignment(sigma_of_graph(Graph.from_edges(2, [(0, 1)])),
                                 {"f0": self.tables[i], "f1": self.tables[j], "g0_1": g, "g1_0": swapped})


def build_fgraph(b: FiniteStructure, cap: int = 256, six_cap: int = 40) -> FGraph:
    """Graph on ternary polymorphisms; f1 ~ f2 when some 6-ary g has them as its two pattern minors.

    When the 6-ary polymorphisms number at most ``six_cap`` they are listed
    and the edges read off; otherwise every pair is decided by a search with
    the pattern positions pinned.
    """
    polys = enumerate_polymorphisms(b, 3, cap)
    if polys.truncated:
        raise CapExceeded(f"more than {cap} ternary polymorphisms")
    tables = polys.tables
    index = {t.values: i for i, t in enumerate(tables)}
    witnesses: dict[tuple[int, int], OperationTable] = {}
    six = enumerate_polymorphisms(b, 6, six_cap)
    if not six.truncated:
        for g in six.tables:
            key = (index[g.minor(LEFT, 3).values], index[g.minor(RIGHT, 3).values])
            witnesses.setdefault(key, g)
    else:
        inst = build_indicator(b, _free(6, "g"))
        csp = inst.to_csp()
        root = csp.root_domains()
        free = root is not None and csp.entailed(root)
        left, right = _pattern_classes(inst, "g")
        for i, f1 in enumerate(tables):
            for j in range(i, len(tables)):
                f2 = tables[j]
                pins: dict[int, int] = {}
                ok = True
                for cls, val in zip(left + right, f1.values + f2.values):
                    if pins.setdefault(cls, val) != val:
                        ok = False
                        break
                if not ok or root is None:
                    continue
                if free:
                    if all((root[cls] >> val) & 1 for cls, val in pins.items()):
                        sol = [pins.get(k, (m & -m).bit_length() - 1) for k, m in enumerate(root)]
                    else:
                        sol = None
                else:
                    sol = csp.solve(pins, lex=False)
                if sol is not None:
                    witnesses[(i, j)] = inst.tables(sol)["g"]
    edges = {(min(i, j), max(i, j)) for i, j in witnesses}
    return FGraph(Graph.from_edges(len(tables), edges), tables, witnesses)


def minion_hom_to_p(b: FiniteStructure, cap: int = 256) -> bool:
    """True iff Pol(b) has no Siggers operation.

    When the F-graph fits under ``cap`` its 3-colourability must give the
    same answer; a disagreement raises InternalError.
    """
    answer = find_siggers(b) is None
    try:
        fg = build_fgraph(b, cap)
    except CapExceeded:
        return answer
    if is_three_colorable(fg.graph) != answer:
        raise InternalError("Siggers search and F-graph colourability disagree")
    return answer


def find_pseudo_siggers(b: FiniteStructure, endo_cap: int = 10_000, six_cap: int = 40
                        ) -> tuple[OperationTable, tuple[OperationTable, OperationTable]] | None:
    """6-ary s and endomorphisms e1, e2 with e1(s(x,y,x,z,y,z)) = e2(s(y,x,z,x,z,y)).

    Pairs are tried with (id, id) first, then in lexicographic order.  Raises
    CapExceeded when more than ``endo_cap`` pairs exist and none of the first
    ``endo_cap`` succeeds.
    """
    ident = OperationTable.identity(b.size)
    # with identity links this is exactly the Siggers indicator
    w = find_siggers(b)
    if w is not None:
        return w.tables["s"], (ident, ident)
    endos = enumerate_polymorphisms(b, 1).tables
    pairs = [(e1, e2) for e1, e2 in product(endos, repeat=2) if (e1, e2) != (ident, ident)]
    truncated = len(pairs) + 1 > endo_cap
    pairs = pairs[:max(endo_cap - 1, 0)]
    six = enumerate_polymorphisms(b, 6, six_cap)
    triples = list(product(range(b.size), repeat=3))
    if not six.truncated:
        for e1, e2 in pairs:
            for s in six.tables:
                if all(e1.values[s(*(t[c] for c in LEFT))] == e2.values[s(*(t[c] for c in RIGHT))] for t in triples):
                    return s, (e1, e2)
    else:
        inst = build_indicator(b, _free(6, "g"))
        base = inst.to_csp()
        left, right = _pattern_classes(inst, "g")
        for e1, e2 in pairs:
            csp = base.copy()
            link = [(p, q) for p in range(b.size) for q in range(b.size) if e1.values[p] == e2.values[q]]
            for a, c in zip(left, right):
                csp.add((a, c), link)
            sol = csp.solve()
            if sol is not None:
                return inst.tables(sol)["g"], (e1, e2)
    if truncated:
        raise CapExceeded(f"more than {endo_cap} endomorphism pairs")
    return None


# -- quotient power ---------------------------------------------------------------------------


def almost_constant(d: int, n: int) -> dict[tuple[int, ...], set[int]]:
    """Almost-constant n-tuples over {0..d-1}, each with the set of its base constants."""
    out: dict[tuple[int, ...], set[int]] = {}
    for x in range(d):
        out.setdefault((x,) * n, set()).add(x)
        for y in range(d):
            for i in range(n):
                t = [x] * n
                t[i] = y
                out.setdefault(tuple(t), set()).add(x)
    return out


class QuotientPower(NamedTuple):
    graph: Graph
    labels: list[int]  # tuple index (lexicographic) -> class


def quotient_power_classes(h: Graph, n: int, bound: int = 1 << 22) -> QuotientPower:
    if n < 2:
        raise InputError("quotient power needs n >= 2")
    d = h.n
    if d ** n > bound:
        raise SizeLimit(f"{d}^{n} tuples exceed the bound {bound}")
    w = _weights(d, n)
    uf = UnionFind(d ** n)
    for t, bases in almost_constant(d, n).items():
        k = int(np.dot(t, w))
        for x in bases:
            uf.union(k, int(np.dot((x,) * n, w)))
    _, labels = np.unique(uf.roots(), return_inverse=True)
    edges = np.array(h.ordered_edges(), dtype=np.int64).reshape(-1, 2)
    pairs = set()
    if len(edges):
        ne = len(edges)
        for lo in range(0, ne ** n, CHUNK):
            rows = edges[_digits(ne, n, lo, min(ne ** n, lo + CHUNK))]
            a = labels[rows[:, :, 0] @ w]
            b = labels[rows[:, :, 1] @ w]
            lo_, hi_ = np.minimum(a, b), np.maximum(a, b)
            pairs.update(zip(lo_.tolist(), hi_.tolist()))
    return QuotientPower(Graph.from_edges(int(labels.max()) + 1, pairs), labels.tolist())


def quotient_power(h: Graph, n: int, bound: int = 1 << 22) -> Graph:
    """H^n with each almost-constant tuple glued to its base constant."""
    return quotient_power_classes(h, n, bound).graph
