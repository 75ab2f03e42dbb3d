"""Height-1 conditions as data, and proofs of implication between them.

A term ``f(x_{p0}, ..., x_{p(n-1)})`` is stored as the symbol id plus the
tuple of variable indices.  Implication is decided on formal minors: pairs
``(symbol, coordinate map into r variables)`` merged under every
instantiation of the source identities.  This closure is exactly
consequence in all clones for height-1 identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .csp import CSP, NodeLimit
from .errors import (
    BadArity,
    BudgetExceeded,
    GlueUndefined,
    InputError,
    NotAHomomorphism,
    UnknownName,
)
from .graphs import Graph, MarkedGraph, glue_layout, hom_search
from .unionfind import UnionFind

# variable patterns of the 6-ary edge symbol
LEFT = (0, 1, 0, 2, 1, 2)
RIGHT = (1, 0, 2, 0, 2, 1)
# the three rows used to turn one 6-ary operation into three ternary ones
SPADE_ROWS = (LEFT, RIGHT, (2, 2, 1, 1, 0, 0))


@dataclass(frozen=True)
class Symbol:
    id: str
    arity: int

    def __post_init__(self):
        if self.arity < 1:
            raise BadArity(f"symbol {self.id} needs positive arity")


@dataclass(frozen=True)
class Term:
    sym: str
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))


@dataclass(frozen=True)
class Identity:
    r: int
    lhs: Term
    rhs: Term

    def __post_init__(self):
        for t in (self.lhs, self.rhs):
            if any(c < 0 or c >= self.r for c in t.coords):
                raise InputError(f"term {t} uses a variable outside 0..{self.r - 1}")


@dataclass(frozen=True)
class H1Condition:
    symbols: tuple[Symbol, ...]
    identities: tuple[Identity, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "identities", tuple(self.identities))
        seen = {}
        for s in self.symbols:
            if s.id in seen:
                raise InputError(f"duplicate symbol {s.id}")
            seen[s.id] = s.arity
        for ident in self.identities:
            for t in (ident.lhs, ident.rhs):
                if t.sym not in seen:
                    raise InputError(f"undeclared symbol {t.sym}")
                if len(t.coords) != seen[t.sym]:
                    raise InputError(f"{t.sym} used with {len(t.coords)} arguments, arity {seen[t.sym]}")

    def arity(self, sym: str) -> int:
        return self._arities[sym]

    @property
    def _arities(self) -> dict[str, int]:
        cache = self.__dict__.get("_arity_cache")
        if cache is None:
            cache = {s.id: s.arity for s in self.symbols}
            object.__setattr__(self, "_arity_cache", cache)
        return cache

    def symbol_ids(self) -> list[str]:
        return [s.id for s in self.symbols]


EMPTY = H1Condition((), ())


def identity(r: int, lsym: str, lcoords: Sequence[int], rsym: str, rcoords: Sequence[int]) -> Identity:
    return Identity(r, Term(lsym, tuple(lcoords)), Term(rsym, tuple(rcoords)))


# -- constructions ------------------------------------------------------------------


def vertex_symbol(v: int) -> str:
    return f"f{v}"


def edge_symbol(u: int, v: int) -> str:
    return f"g{u}_{v}"


def sigma_of_graph(g: Graph) -> H1Condition:
    """Ternary ``f_v`` per vertex and 6-ary ``g_(u,v)`` per ordered edge."""
    symbols = [Symbol(vertex_symbol(v), 3) for v in range(g.n)]
    identities = []
    for u, v in g.ordered_edges():
        e = edge_symbol(u, v)
        symbols.append(Symbol(e, 6))
        identities.append(identity(3, vertex_symbol(u), (0, 1, 2), e, LEFT))
        identities.append(identity(3, vertex_symbol(v), (0, 1, 2), e, RIGHT))
    return H1Condition(tuple(symbols), tuple(identities))


def siggers() -> H1Condition:
    return H1Condition((Symbol("s", 6),), (identity(3, "s", LEFT, "s", RIGHT),))


def qnu(n: int) -> H1Condition:
    """Quasi near unanimity: f(x,..,y,..,x) = f(x,..,x) for each position of y."""
    if n < 3:
        raise BadArity("quasi near unanimity needs arity at least 3")
    idents = []
    for i in range(n):
        coords = [0] * n
        coords[i] = 1
        idents.append(identity(2, "f", coords, "f", [0] * n))
    return H1Condition((Symbol("f", n),), tuple(idents))


def builtin_condition(name: str, arity: int | None = None) -> H1Condition:
    if name == "siggers":
        return siggers()
    if name == "qnu":
        if arity is None:
            raise BadArity("qnu needs an arity")
        return qnu(arity)
    raise UnknownName(f"unknown builtin condition {name!r}")


# -- triviality (Label Cover) -------------------------------------------------------


def is_trivial(c: H1Condition) -> dict[str, int] | None:
    """Lexicographically least choice of projection coordinate per symbol.

    Coordinates are 0-based; symbols are ordered as declared.  None means no
    assignment of projections satisfies the condition.
    """
    index = {s.id: i for i, s in enumerate(c.symbols)}
    csp = CSP([s.arity for s in c.symbols])
    for ident in c.identities:
        p, q = ident.lhs.coords, ident.rhs.coords
        allowed = [(i, j) for i in range(len(p)) for j in range(len(q)) if p[i] == q[j]]
        csp.add((index[ident.lhs.sym], index[ident.rhs.sym]), allowed)
    sol = csp.solve()
    if sol is None:
        return None
    return {s.id: sol[i] for i, s in enumerate(c.symbols)}


# -- formal-minor closure -----------------------------------------------------------


class MinorClosure:
    """Classes of formal minors over ``r`` variables modulo a condition."""

    def __init__(self, source: H1Condition, r: int):
        self.source = source
        self.r = r
        self.offset: dict[str, int] = {}
        total = 0
        for s in source.symbols:
            self.offset[s.id] = total
            total += r ** s.arity
        self.uf = UnionFind(total)
        for ident in source.identities:
            for assign in product(range(r), repeat=ident.r):
                a = self.index(ident.lhs.sym, [assign[c] for c in ident.lhs.coords])
                b = self.index(ident.rhs.sym, [assign[c] for c in ident.rhs.coords])
                self.uf.union(a, b)

    def index(self, sym: str, coords: Sequence[int]) -> int:
        r = self.r
        k = 0
        for c in coords:
            k = k * r + c
        return self.offset[sym] + k

    def cls(self, sym: str, coords: Sequence[int]) -> int:
        return self.uf.find(self.index(sym, coords))

    def roots(self) -> np.ndarray:
        """Class representative of every formal minor, by global index."""
        cached = self.__dict__.get("_roots")
        if cached is None:
            cached = self._roots = self.uf.roots()
        return cached

    def same(self, a: Term, b: Term) -> bool:
        return self.cls(a.sym, a.coords) == self.cls(b.sym, b.coords)


@lru_cache(maxsize=64)
def minor_closure(source: H1Condition, r: int) -> MinorClosure:
    return MinorClosure(source, r)


def entails_identity(source: H1Condition, target: Identity) -> bool:
    """Whether every clone satisfying ``source`` satisfies ``target``."""
    for t in (target.lhs, target.rhs):
        if t.sym not in source._arities or source.arity(t.sym) != len(t.coords):
            raise InputError(f"target term {t} does not match a source symbol")
    if target.lhs == target.rhs:
        return True
    return minor_closure(source, target.r).same(target.lhs, target.rhs)


# -- derivations ----------------------------------------------------------------------


@dataclass(frozen=True)
class MinorDerivation:
    """target symbol -> (source symbol, rearrangement).

    ``t -> (s, mu)`` defines ``t(x_0, .., x_{n-1}) := s(x_{mu[0]}, .., x_{mu[m-1]})``.
    """

    mapping: tuple[tuple[str, tuple[str, tuple[int, ...]]], ...]

    @classmethod
    def of(cls, mapping: dict[str, tuple[str, Sequence[int]]]) -> "MinorDerivation":
        return cls(tuple(sorted((t, (s, tuple(mu))) for t, (s, mu) in mapping.items())))

    def as_dict(self) -> dict[str, tuple[str, tuple[int, ...]]]:
        return dict(self.mapping)

    def translate_term(self, term: Term) -> Term:
        s, mu = self.as_dict()[term.sym]
        return Term(s, tuple(term.coords[k] for k in mu))

    def translate(self, ident: Identity) -> Identity:
        return Identity(ident.r, self.translate_term(ident.lhs), self.translate_term(ident.rhs))


def check_derivation(source: H1Condition, target: H1Condition, deriv: MinorDerivation) -> bool:
    mapping = deriv.as_dict()
    for sym in target.symbols:
        if sym.id not in mapping:
            return False
        s, mu = mapping[sym.id]
        if s not in source._arities or len(mu) != source.arity(s):
            return False
        if any(k < 0 or k >= sym.arity for k in mu):
            return False
    return all(entails_identity(source, deriv.translate(i)) for i in target.identities)


def _is_hom(g: Graph, h: Graph, hom: dict[int, int]) -> bool:
    if set(hom) != set(range(g.n)) or any(not 0 <= w < h.n for w in hom.values()):
        return False
    return all(h.has_edge(hom[u], hom[v]) for u, v in g.edges)


def derive_from_hom(g: Graph, h: Graph, hom: dict[int, int]) -> MinorDerivation:
    """Certificate that the condition of ``h`` implies the condition of ``g``."""
    if not _is_hom(g, h, hom):
        raise NotAHomomorphism("map does not preserve edges")
    mapping = {vertex_symbol(v): (vertex_symbol(hom[v]), (0, 1, 2)) for v in range(g.n)}
    for u, v in g.ordered_edges():
        mapping[edge_symbol(u, v)] = (edge_symbol(hom[u], hom[v]), tuple(range(6)))
    return MinorDerivation.of(mapping)


def spade_sigma(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Coordinate map sending the (LEFT, RIGHT) columns onto the columns of rows a, b."""
    column = {(LEFT[j], RIGHT[j]): j for j in range(6)}
    return tuple(column[(a[k], b[k])] for k in range(6))


def _glue_side(w: Graph, own: Sequence[int], own_names: Sequence[int], marked: tuple[int, int],
               own_graph: Graph) -> MinorDerivation:
    """Derivation of the W condition from one side's condition.

    ``own`` lists the W vertices of this side, ``own_names`` the matching
    vertex names in the side's own graph, ``marked`` the side's marked edge
    in its own names.
    """
    to_w = dict(zip(own_names, own))
    ge = edge_symbol(*marked)
    wx, wx_ = to_w[marked[0]], to_w[marked[1]]
    own_set = set(own)
    rest = sorted(set(range(w.n)) - own_set | {wx, wx_})
    pos = {v: i for i, v in enumerate(rest)}
    sub = Graph(len(rest), frozenset((pos[u], pos[v]) for u, v in w.edges if u in pos and v in pos))
    col = hom_search(sub, Graph(3, frozenset({(0, 1), (0, 2), (1, 2)})), pins={pos[wx]: 0, pos[wx_]: 1})
    if col is None:
        raise GlueUndefined("no coloring of the far side with distinct marked endpoints")
    color = {v: col[pos[v]] for v in rest}
    from_w = {wv: name for name, wv in to_w.items()}
    own_edges = {(to_w[a], to_w[b]) for a, b in own_graph.ordered_edges()} - {(wx, wx_), (wx_, wx)}
    mapping: dict[str, tuple[str, tuple[int, ...]]] = {}
    for v in range(w.n):
        if v in color:
            mapping[vertex_symbol(v)] = (ge, SPADE_ROWS[color[v]])
        else:
            mapping[vertex_symbol(v)] = (vertex_symbol(from_w[v]), (0, 1, 2))
    for u, v in w.ordered_edges():
        if (u, v) in own_edges:
            mapping[edge_symbol(u, v)] = (edge_symbol(from_w[u], from_w[v]), tuple(range(6)))
        else:
            sigma = spade_sigma(SPADE_ROWS[color[u]], SPADE_ROWS[color[v]])
            mapping[edge_symbol(u, v)] = (ge, sigma)
    return MinorDerivation.of(mapping)


def derive_glue(g: MarkedGraph, h: MarkedGraph) -> tuple[MinorDerivation, MinorDerivation]:
    """Certificates that both side conditions imply the condition of the glued graph."""
    try:
        layout = glue_layout(g, h)
    except InputError as exc:
        raise GlueUndefined(str(exc)) from exc
    w = layout.result.graph
    from_g = _glue_side(w, layout.g_map, range(g.graph.n), g.marked, g.graph)
    from_h = _glue_side(w, layout.h_map, range(h.graph.n), h.marked, h.graph)
    return from_g, from_h


# -- derivation search ------------------------------------------------------------------


@lru_cache(maxsize=32)
def _formal_minors(source: H1Condition, n: int) -> tuple[tuple[str, np.ndarray], ...]:
    """Digit arrays of every n-ary formal minor, symbol by symbol, maps in lex order."""
    blocks = []
    for s in source.symbols:
        idx = np.arange(n ** s.arity, dtype=np.int64)
        digits = np.stack([(idx // n ** (s.arity - 1 - k)) % n for k in range(s.arity)], axis=1)
        blocks.append((s.id, digits))
    return tuple(blocks)


@lru_cache(maxsize=256)
def _keys(source: H1Condition, n: int, coords: tuple[int, ...], r: int) -> np.ndarray:
    """Level-r class of ``(s, coords o mu)`` for every n-ary formal minor ``(s, mu)``."""
    closure = minor_closure(source, r)
    roots = closure.roots()
    pi = np.asarray(coords, dtype=np.int64)
    out = [np.zeros(0, dtype=np.int64)]
    for sym, digits in _formal_minors(source, n):
        weights = r ** np.arange(digits.shape[1] - 1, -1, -1, dtype=np.int64)
        out.append(roots[closure.offset[sym] + pi[digits] @ weights])
    return np.concatenate(out)


def _decode(source: H1Condition, n: int, i: int) -> tuple[str, tuple[int, ...]]:
    for sym, digits in _formal_minors(source, n):
        if i < len(digits):
            return sym, tuple(int(d) for d in digits[i])
        i -= len(digits)
    raise IndexError(i)


def _own_index(source: H1Condition, sym: Symbol) -> int | None:
    """Global index of ``sym(x_0, .., x_{n-1})`` when the source declares ``sym``."""
    if source._arities.get(sym.id) != sym.arity:
        return None
    base = 0
    for s in source.symbols:
        if s.id == sym.id:
            n = sym.arity
            return base + sum(k * n ** (n - 1 - k) for k in range(n))
        base += sym.arity ** s.arity
    return None


@lru_cache(maxsize=64)
def _domain(source: H1Condition, sym: Symbol) -> tuple[int, ...]:
    """One formal minor per class: the symbol itself first, then most essential first."""
    n = sym.arity
    keys = _keys(source, n, tuple(range(n)), n)
    _, first = np.unique(keys, return_index=True)
    distinct = []
    for _, digits in _formal_minors(source, n):
        srt = np.sort(digits, axis=1)
        distinct.append(1 + (srt[:, 1:] != srt[:, :-1]).sum(axis=1) if digits.shape[1] else np.zeros(len(digits), int))
    distinct = np.concatenate(distinct)[first]
    reps = first[np.lexsort((first, -distinct))].tolist()
    own = _own_index(source, sym)
    if own is not None:
        own_cls = keys[own]
        reps = [own] + [i for i in reps if keys[i] != own_cls]
    return tuple(reps)


def _identity_derivation(source: H1Condition, target: H1Condition) -> MinorDerivation | None:
    if any(source._arities.get(s.id) != s.arity for s in target.symbols):
        return None
    deriv = MinorDerivation.of({s.id: (s.id, tuple(range(s.arity))) for s in target.symbols})
    return deriv if check_derivation(source, target, deriv) else None


@lru_cache(maxsize=64)
def _key_rows(source: H1Condition, n: int, pattern: tuple) -> tuple[np.ndarray, np.ndarray]:
    """Distinct key rows over all n-ary formal minors, with a first minor for each."""
    rows = np.stack([_keys(source, n, coords, r) for coords, r in pattern], axis=1)
    return np.unique(rows, axis=0, return_index=True)


def _recover(source: H1Condition, sym: Symbol, pattern: tuple, keys: tuple) -> int:
    """A formal minor of ``sym``'s arity whose key row is ``keys``, preferring ``sym`` itself."""
    own = _own_index(source, sym)
    if own is not None:
        if tuple(int(_keys(source, sym.arity, c, r)[own]) for c, r in pattern) == keys:
            return own
    uniq, first = _key_rows(source, sym.arity, pattern)
    hit = np.flatnonzero((uniq == np.asarray(keys)).all(axis=1))
    return int(first[hit[0]])


def find_derivation(source: H1Condition, target: H1Condition, budget: int = 100_000) -> MinorDerivation | None:
    """Search for a derivation of ``target`` from ``source``.

    Target symbols range over classes of formal minors of the source.  Each
    term of an identity gets a key variable holding the class of the term
    at the identity's level, channelled to the value of its symbol.  A symbol
    whose identities all pair it with other, non-eliminated symbols is
    projected away into one constraint on the partner keys and recovered
    after solving.  Sound, not complete: None means only that no derivation
    was found.  Raises BudgetExceeded after ``budget`` search nodes.
    """
    same = _identity_derivation(source, target)
    if same is not None:
        return same
    tsyms = list(target.symbols)
    occurs: dict[str, list[tuple[Identity, Term, Term]]] = {s.id: [] for s in tsyms}
    for ident in target.identities:
        occurs[ident.lhs.sym].append((ident, ident.lhs, ident.rhs))
        if ident.rhs.sym != ident.lhs.sym:
            occurs[ident.rhs.sym].append((ident, ident.rhs, ident.lhs))

    elim: set[str] = set()
    for s in sorted(tsyms, key=lambda s: -s.arity):
        occ = occurs[s.id]
        if occ and all(own.sym != other.sym and other.sym not in elim for _, own, other in occ):
            elim.add(s.id)
    kept = [s for s in tsyms if s.id not in elim]
    index = {s.id: i for i, s in enumerate(kept)}
    arity = {s.id: s.arity for s in tsyms}
    domains = {s.id: np.asarray(_domain(source, s), dtype=np.int64) for s in kept}

    # key variables: (term, level) -> (variable, sorted distinct keys)
    sizes = [len(domains[s.id]) for s in kept]
    keyvars: dict[tuple[Term, int], tuple[int, np.ndarray]] = {}
    channels = []

    def keyvar(term: Term, r: int) -> tuple[int, np.ndarray]:
        hit = keyvars.get((term, r))
        if hit is None:
            per_value = _keys(source, arity[term.sym], term.coords, r)[domains[term.sym]]
            values, inv = np.unique(per_value, return_inverse=True)
            hit = keyvars[(term, r)] = (len(sizes), values)
            sizes.append(len(values))
            channels.append(((index[term.sym], hit[0]), list(enumerate(inv.tolist()))))
        return hit

    pending = []
    unary = []
    for ident in target.identities:
        a, b = ident.lhs, ident.rhs
        if a.sym in elim or b.sym in elim:
            continue
        if a.sym == b.sym:
            dom = domains[a.sym]
            ka = _keys(source, arity[a.sym], a.coords, ident.r)[dom]
            kb = _keys(source, arity[a.sym], b.coords, ident.r)[dom]
            unary.append((index[a.sym], np.flatnonzero(ka == kb).tolist()))
            continue
        (va, ka), (vb, kb) = keyvar(a, ident.r), keyvar(b, ident.r)
        common, ia, ib = np.intersect1d(ka, kb, return_indices=True)
        pending.append(((va, vb), list(zip(ia.tolist(), ib.tolist()))))

    recover: dict[str, tuple] = {}
    rel_cache: dict[tuple, list] = {}
    for s in tsyms:
        if s.id not in elim:
            continue
        occ = occurs[s.id]
        pattern = tuple((own.coords, ident.r) for ident, own, _ in occ)
        uniq, _ = _key_rows(source, s.arity, pattern)
        recover[s.id] = pattern
        scope = [keyvar(other, ident.r) for ident, _, other in occ]
        ck = (pattern, tuple(vals.tobytes() for _, vals in scope))
        if ck not in rel_cache:
            cols, keep = [], np.ones(len(uniq), dtype=bool)
            for q, (_, vals) in enumerate(scope):
                pos = np.clip(np.searchsorted(vals, uniq[:, q]), 0, len(vals) - 1)
                keep &= vals[pos] == uniq[:, q]
                cols.append(pos)
            rel_cache[ck] = np.stack(cols, axis=1)[keep].tolist()
        pending.append((tuple(var for var, _ in scope), ck))

    csp = CSP(sizes)
    csp.node_limit = budget
    for var, values in unary:
        csp.restrict(var, values)
    for scope, allowed in channels:
        csp.add(scope, allowed)
    rids: dict[tuple, int] = {}
    for scope, allowed in pending:
        if isinstance(allowed, tuple):
            if allowed not in rids:
                rids[allowed] = csp.relation(rel_cache[allowed], len(scope))
            csp.add_rel(scope, rids[allowed])
        else:
            csp.add(scope, allowed)
    try:
        sol = csp.solve()
    except NodeLimit as exc:
        raise BudgetExceeded(f"derivation search exceeded {budget} nodes") from exc
    if sol is None:
        return None
    chosen = {s.id: int(domains[s.id][sol[index[s.id]]]) for s in kept}
    mapping = {sid: _decode(source, arity[sid], i) for sid, i in chosen.items()}
    for s in tsyms:
        if s.id in elim:
            keys = tuple(int(_keys(source, arity[other.sym], other.coords, ident.r)[chosen[other.sym]])
                         for ident, _, other in occurs[s.id])
            mapping[s.id] = _decode(source, s.arity, _recover(source, s, recover[s.id], keys))
    return MinorDerivation.of(mapping)


def refute_implication(source: H1Condition, target: H1Condition, witnesses: Iterable) -> object | None:
    """First structure whose polymorphisms satisfy ``source`` but not ``target``."""
    from .clones import satisfies

    for b in witnesses:
        if satisfies(b, source) is not None and satisfies(b, target) is None:
            return b
    return None


def same_up_to_renaming(a: H1Condition, b: H1Condition) -> bool:
    """Equality of conditions modulo an arity-preserving renaming of symbols."""
    if sorted(s.arity for s in a.symbols) != sorted(s.arity for s in b.symbols):
        return False
    if len(set(a.identities)) != len(set(b.identities)):
        return False
    target = {_orient(i) for i in b.identities}
    bsyms = [s for s in b.symbols]
    asyms = list(a.symbols)

    def rec(k, used, ren):
        if k == len(asyms):
            return {_orient(_rename(i, ren)) for i in a.identities} == target
        for cand in bsyms:
            if cand.id not in used and cand.arity == asyms[k].arity:
                ren[asyms[k].id] = cand.id
                if rec(k + 1, used | {cand.id}, ren):
                    return True
        return False

    return rec(0, frozenset(), {})


def _rename(i: Identity, ren: dict[str, str]) -> Identity:
    return Identity(i.r, Term(ren[i.lhs.sym], i.lhs.coords), Term(ren[i.rhs.sym], i.rhs.coords))


def _orient(i: Identity) -> tuple:
    a = (i.lhs.sym, i.lhs.coords)
    b = (i.rhs.sym, i.rhs.coords)
    return (i.r,) + (min(a, b), max(a, b))
