"""Finite undirected graphs, homomorphism search, and the glueing construction.

Vertices are ``0..n-1``; an edge is stored once as a sorted pair and a loop
is the pair ``(v, v)``.  Everything that returns a witness returns the
lexicographically least one so results never depend on search internals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations, product
from typing import Iterable, Iterator

from .csp import CSP
from .errors import (
    GadgetInvalid,
    InputError,
    LoopPresent,
    NotCritical,
    SeedsExhausted,
    ThreeColorable,
)

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        edges = frozenset(_norm(int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"edge ({u},{v}) out of range for n={self.n}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "Graph":
        return cls(n, frozenset(edges))

    @cached_property
    def adj(self) -> tuple[frozenset, ...]:
        nbrs: list[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def ordered_edges(self) -> list[Edge]:
        """Both orientations of every edge, a loop once, sorted."""
        out = set()
        for u, v in self.edges:
            out.add((u, v))
            out.add((v, u))
        return sorted(out)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def has_loop(self) -> bool:
        return any(u == v for u, v in self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def without(self, edge: Edge) -> "Graph":
        return Graph(self.n, self.edges - {_norm(*edge)})

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.sorted_edges()})"


@dataclass(frozen=True)
class MarkedGraph:
    graph: Graph
    marked: Edge

    def __post_init__(self):
        if not self.graph.has_edge(*self.marked):
            raise InputError(f"marked pair {self.marked} is not an edge")


# -- small named graphs ---------------------------------------------------------


def complete(n: int) -> Graph:
    return Graph(n, frozenset(combinations(range(n), 2)))


def cycle(n: int) -> Graph:
    return Graph(n, frozenset(_norm(i, (i + 1) % n) for i in range(n)))


def wheel(spokes: int) -> Graph:
    """Cycle on ``0..spokes-1`` plus a hub joined to every rim vertex."""
    rim = cycle(spokes)
    hub = spokes
    return Graph(spokes + 1, rim.edges | {(i, hub) for i in range(spokes)})


def looped_vertex() -> Graph:
    return Graph(1, frozenset({(0, 0)}))


K3 = complete(3)


# -- homomorphisms -------------------------------------------------------------


def hom_csp(source: Graph, target: Graph) -> CSP:
    csp = CSP([target.n] * source.n)
    rel = csp.relation(target.ordered_edges(), 2)
    for u, v in source.sorted_edges():
        csp.add_rel((u, v), rel)
    return csp


def hom_search(source: Graph, target: Graph, pins: dict[int, int] | None = None) -> dict[int, int] | None:
    """Lexicographically least homomorphism ``source -> target`` or None."""
    if source.n and not target.n:
        return None
    sol = hom_csp(source, target).solve(pins=pins)
    return None if sol is None else dict(enumerate(sol))


def hom_exists(source: Graph, target: Graph, pins: dict[int, int] | None = None) -> bool:
    if source.n and not target.n:
        return False
    return hom_csp(source, target).solve(pins=pins, lex=False) is not None


def three_coloring(g: Graph) -> dict[int, int] | None:
    return hom_search(g, K3)


def is_three_colorable(g: Graph) -> bool:
    return hom_exists(g, K3)


def is_critical(g: Graph, edge: Edge) -> bool:
    return g.has_edge(*edge) and not is_three_colorable(g) and is_three_colorable(g.without(edge))


def trim_to_critical(g: Graph) -> tuple[Graph, Edge]:
    """Drop edges in lexicographic order until the graph becomes 3-colorable.

    Returns the last non-3-colorable graph and the edge whose removal made
    the difference; that edge is critical for the returned graph.
    """
    if g.has_loop():
        raise LoopPresent("graph has a loop")
    if is_three_colorable(g):
        raise ThreeColorable("graph is 3-colorable")
    current = g
    for e in g.sorted_edges():
        nxt = current.without(e)
        if is_three_colorable(nxt):
            return current, e
        current = nxt
    raise AssertionError("edgeless graph cannot be non-3-colorable")


# -- gadget ---------------------------------------------------------------------

# top path t0..t5 = 0..5, bottom path b0..b5 = 6..11,
# crossing vertices m0, m1, m3, m4 = 12..15, apexes a = 16, b = 17
_TOP = list(range(6))
_BOT = list(range(6, 12))
_CROSS = {0: 12, 1: 13, 3: 14, 4: 15}
_APEX_A, _APEX_B = 16, 17


@dataclass(frozen=True)
class GadgetN:
    graph: Graph
    boundary: dict
    d: Edge

    @property
    def x(self):
        return self.boundary["x"]

    @property
    def x_(self):
        return self.boundary["x'"]

    @property
    def y(self):
        return self.boundary["y"]

    @property
    def y_(self):
        return self.boundary["y'"]


def _gadget_edges() -> set[Edge]:
    edges: set[Edge] = set()
    for i in range(5):
        edges.add((_TOP[i], _TOP[i + 1]))
        edges.add((_BOT[i], _BOT[i + 1]))
    for i, m in _CROSS.items():
        for v in (_TOP[i], _TOP[i + 1], _BOT[i], _BOT[i + 1]):
            edges.add(_norm(v, m))
    edges.add(_norm(_BOT[2], _TOP[3]))
    edges.add(_norm(_BOT[3], _TOP[2]))
    edges.add(_norm(_APEX_A, _BOT[2]))
    edges.add(_norm(_APEX_A, _BOT[3]))
    edges.add(_norm(_APEX_B, _TOP[2]))
    edges.add(_norm(_APEX_B, _TOP[3]))
    edges.add((_APEX_A, _APEX_B))
    return edges


def build_gadget_n(verify: bool = True) -> GadgetN:
    gadget = GadgetN(
        graph=Graph(18, frozenset(_gadget_edges())),
        boundary={"x": _TOP[0], "x'": _BOT[0], "y": _TOP[5], "y'": _BOT[5]},
        d=(_APEX_A, _APEX_B),
    )
    if verify:
        verify_gadget_n(gadget)
    return gadget


@dataclass
class GadgetReport:
    extendable_n: int
    eqeq_extendable_n_minus_d: int
    p1: bool
    p2: bool
    p3: bool

    @property
    def passed(self) -> bool:
        return self.p1 and self.p2 and self.p3


def verify_gadget_n(gadget: GadgetN, strict: bool = True) -> GadgetReport:
    """Check the three boundary properties over all 81 boundary colorings.

    (P1) a boundary coloring extends to N exactly when precisely one of the
    pairs (x, x'), (y, y') is colored differently; (P2) every such coloring
    extends; (P3) every coloring with both pairs equal extends to N - d.
    """
    g = gadget.graph
    g_minus_d = g.without(gadget.d)
    labels = ("x", "x'", "y", "y'")
    verts = [gadget.boundary[k] for k in labels]
    ext = set()
    xor = set()
    eqeq = []
    eqeq_ok = 0
    for cols in product(range(3), repeat=4):
        pins = dict(zip(verts, cols))
        bx, bx_, by, by_ = cols
        if (bx != bx_) != (by != by_):
            xor.add(cols)
        if hom_exists(g, K3, pins):
            ext.add(cols)
        if bx == bx_ and by == by_:
            eqeq.append(cols)
            if hom_exists(g_minus_d, K3, pins):
                eqeq_ok += 1
    report = GadgetReport(
        extendable_n=len(ext),
        eqeq_extendable_n_minus_d=eqeq_ok,
        p1=ext == xor,
        p2=xor <= ext,
        p3=eqeq_ok == len(eqeq),
    )
    if strict and not report.passed:
        raise GadgetInvalid(f"gadget properties fail: {report}")
    return report


# -- glue -----------------------------------------------------------------------


@dataclass(frozen=True)
class GlueLayout:
    """Vertex bookkeeping of (G,e) + (H,f): where each part landed in W."""

    result: MarkedGraph
    g_map: tuple[int, ...]
    n_map: tuple[int, ...]
    h_map: tuple[int, ...]


def _check_glue_input(m: MarkedGraph, name: str) -> None:
    g = m.graph
    if g.has_loop():
        raise LoopPresent(f"{name} has a loop")
    if is_three_colorable(g):
        raise ThreeColorable(f"{name} is 3-colorable")
    if not is_three_colorable(g.without(m.marked)):
        raise NotCritical(f"marked edge {m.marked} of {name} is not critical")


def glue_layout(g: MarkedGraph, h: MarkedGraph, check: bool = True) -> GlueLayout:
    if check:
        _check_glue_input(g, "G")
        _check_glue_input(h, "H")
    gadget = build_gadget_n(verify=False)
    ng, nh = g.graph.n, h.graph.n
    e0, e1 = g.marked
    f0, f1 = h.marked
    g_map = tuple(range(ng))
    boundary = {gadget.x: e0, gadget.x_: e1}
    n_map = []
    nxt = ng
    interior = [v for v in range(18) if v not in (gadget.x, gadget.x_, gadget.y, gadget.y_)]
    slot = {}
    for v in interior:
        slot[v] = nxt
        nxt += 1
    h_offset = nxt
    h_map = tuple(h_offset + v for v in range(nh))
    boundary[gadget.y] = h_map[f0]
    boundary[gadget.y_] = h_map[f1]
    for v in range(18):
        n_map.append(boundary[v] if v in boundary else slot[v])
    edges = set()
    for u, v in g.graph.without(g.marked).edges:
        edges.add(_norm(g_map[u], g_map[v]))
    for u, v in h.graph.without(h.marked).edges:
        edges.add(_norm(h_map[u], h_map[v]))
    for u, v in gadget.graph.edges:
        edges.add(_norm(n_map[u], n_map[v]))
    w = Graph(h_offset + nh, frozenset(edges))
    d = (n_map[gadget.d[0]], n_map[gadget.d[1]])
    return GlueLayout(MarkedGraph(w, d), g_map, tuple(n_map), h_map)


def glue(g: MarkedGraph, h: MarkedGraph) -> MarkedGraph:
    """(G,e) + (H,f): join G - e and H - f through a fresh copy of N."""
    return glue_layout(g, h).result


# -- seed enumeration -----------------------------------------------------------


def _refine(g: Graph) -> list[int]:
    """Colour refinement starting from degrees; colour 0 holds the highest degree."""
    colors = [-g.degree(v) for v in range(g.n)]
    count = -1
    while True:
        sigs = [(colors[v], tuple(sorted(colors[w] for w in g.adj[v]))) for v in range(g.n)]
        order = sorted(set(sigs))
        rank = {s: i for i, s in enumerate(order)}
        colors = [rank[s] for s in sigs]
        if len(order) == count:
            return colors
        count = len(order)


def _encode(g: Graph, label: list[int]) -> tuple[int, ...]:
    n = g.n
    inv = [0] * n
    for v, lv in enumerate(label):
        inv[lv] = v
    return tuple(1 if g.has_edge(inv[i], inv[j]) else 0 for i, j in combinations(range(n), 2))


def canonical_form(g: Graph) -> tuple[tuple[int, ...], list[int]]:
    """Minimal adjacency bit string over refinement-respecting labelings.

    Vertices are placed colour class by colour class; within a class every
    order is tried.  Returns the bit string and the winning relabeling
    (old vertex -> new vertex).
    """
    colors = _refine(g)
    classes: dict[int, list[int]] = {}
    for v in range(g.n):
        classes.setdefault(colors[v], []).append(v)
    groups = [classes[c] for c in sorted(classes)]
    best = None
    best_label = None
    for choice in product(*(permutations(grp) for grp in groups)):
        label = [0] * g.n
        pos = 0
        for grp in choice:
            for v in grp:
                label[v] = pos
                pos += 1
        code = _encode(g, label)
        if best is None or code < best:
            best, best_label = code, label
    return best if best is not None else (), best_label or []


def relabel(g: Graph, label: list[int]) -> Graph:
    return Graph(g.n, frozenset(_norm(label[u], label[v]) for u, v in g.edges))


def canonical(g: Graph) -> Graph:
    return relabel(g, canonical_form(g)[1])


def _decode(n: int, code: tuple[int, ...]) -> Graph:
    pairs = list(combinations(range(n), 2))
    return Graph(n, frozenset(p for p, b in zip(pairs, code) if b))


def graphs_by_edges(n: int) -> Iterator[tuple[int, list[tuple[int, ...]]]]:
    """Loopless graphs on ``n`` vertices up to isomorphism, one edge count at a time.

    Yields ``(m, codes)`` with ``codes`` the sorted canonical bit strings of
    all classes with ``m`` edges.
    """
    pairs = list(combinations(range(n), 2))
    level = {tuple([0] * len(pairs))}
    for m in range(len(pairs) + 1):
        codes = sorted(level)
        yield m, codes
        nxt = set()
        for code in codes:
            g = _decode(n, code)
            for idx, b in enumerate(code):
                if not b:
                    nxt.add(canonical_form(Graph(n, g.edges | {pairs[idx]}))[0])
        level = nxt


def all_graphs(n: int) -> Iterator[Graph]:
    """Canonical representatives of every loopless graph on ``n`` vertices."""
    for _, codes in graphs_by_edges(n):
        for code in codes:
            yield _decode(n, code)


def enumerate_seeds(max_vertices: int) -> Iterator[MarkedGraph]:
    """Non-3-colorable loopless graphs with a critical edge, canonically ordered.

    Order is (vertex count, edge count, canonical bit string); the marked
    edge is the lexicographically least critical edge.  Lazy: consumers
    that stop early never pay for larger vertex counts.
    """
    for n in range(1, max_vertices + 1):
        for _, codes in graphs_by_edges(n):
            for code in codes:
                g = _decode(n, code)
                if is_three_colorable(g):
                    continue
                for e in g.sorted_edges():
                    if is_three_colorable(g.without(e)):
                        yield MarkedGraph(g, e)
                        break


def build_chain(n: int, max_vertices: int) -> list[MarkedGraph]:
    """H_1 = G_1 and H_{k+1} = (H_k, f_k) + (G_{k+1}, e_{k+1})."""
    if n < 1:
        raise InputError("chain length must be at least 1")
    seeds = []
    for seed in enumerate_seeds(max_vertices):
        seeds.append(seed)
        if len(seeds) == n:
            break
    if len(seeds) < n:
        raise SeedsExhausted(f"only {len(seeds)} seeds with at most {max_vertices} vertices")
    chain = [seeds[0]]
    for seed in seeds[1:]:
        chain.append(glue(chain[-1], seed))
    for h in chain:
        if h.graph.has_loop() or is_three_colorable(h.graph):
            raise AssertionError("chain element lost non-3-colorability")
    return chain
