"""CSPs over templates that forbid homomorphic images of a fixed graph.

An instance is satisfiable iff the forbidden graph does not map into it, so
the decision is one bounded homomorphism search.  Also here: the tuple
blow-up of a graph and the list of loop-like single-tuple structures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .clones import FiniteStructure, structure
from .errors import InputError, LoopPresent
from .graphs import Graph, hom_exists


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return False
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in g.adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.n


@dataclass(frozen=True)
class TemplateForb:
    forbidden: Graph

    def __post_init__(self):
        if self.forbidden.has_loop():
            raise LoopPresent("forbidden graph must be loopless")
        if not self.forbidden.edges:
            raise InputError("forbidden graph needs an edge")
        if not is_connected(self.forbidden):
            raise InputError("forbidden graph must be connected")


@dataclass(frozen=True)
class CspInstance:
    var_count: int
    atoms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple((int(u), int(v)) for u, v in self.atoms))
        if any(not (0 <= u < self.var_count and 0 <= v < self.var_count) for u, v in self.atoms):
            raise InputError("atom uses an undeclared variable")

    def graph(self) -> Graph:
        """E(u,u) becomes a loop; E is read symmetrically."""
        return Graph.from_edges(self.var_count, ((min(u, v), max(u, v)) for u, v in self.atoms))


def solve_css_csp(t: TemplateForb, inst: CspInstance) -> bool:
    """Accept iff no homomorphism from the forbidden graph into the instance."""
    return not hom_exists(t.forbidden, inst.graph())


def encode_graph_tuples(g: Graph, n: int) -> FiniteStructure:
    """Vertex x becomes the block x*n .. x*n+n-1; R(x̄, ȳ) for each ordered edge (x, y)."""
    if g.has_loop():
        raise LoopPresent("tuple encoding needs a loopless graph")
    if n < 1:
        raise InputError("block length must be positive")
    block = [tuple(range(x * n, x * n + n)) for x in range(g.n)]
    return structure(g.n * n, [("R", 2 * n, [block[x] + block[y] for x, y in g.ordered_edges()])])


def set_partitions(m: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length m, lexicographically."""
    def rec(prefix: list[int], top: int):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            prefix.append(b)
            yield from rec(prefix, max(top, b))
            prefix.pop()
    if m == 0:
        yield ()
        return
    yield from rec([0], 0)


def loop_like_bounds(n: int) -> list[FiniteStructure]:
    """One single-tuple 2n-ary structure per partition of the positions into < 2n blocks.

    Ordered by number of blocks, then by the partition's growth string.
    """
    if n < 1:
        raise InputError("arity must be at least 1")
    parts = [p for p in set_partitions(2 * n) if max(p) + 1 < 2 * n]
    parts.sort(key=lambda p: (max(p), p))
    return [structure(max(p) + 1, [("R", 2 * n, [p])]) for p in parts]


def blocks_graph(b: FiniteStructure, n: int) -> Graph:
    """Read a tuple encoding back as a graph on blocks."""
    rel = b.relation("R")
    edges = set()
    for t in rel.tuples:
        x, y = t[0] // n, t[n] // n
        edges.add((min(x, y), max(x, y)))
    return Graph.from_edges(b.size // n, edges)


def instance_from_atoms(var_count: int, atoms: Sequence[Sequence[int]]) -> CspInstance:
    return CspInstance(var_count, tuple(tuple(a) for a in atoms))
