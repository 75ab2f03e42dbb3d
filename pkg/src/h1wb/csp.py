"""Finite-domain constraint solver used by every search in the package.

Variables are dense ints with small integer domains stored as bitmasks.
Constraints are extensional (scope, relation) pairs kept generalized arc
consistent during a depth-first search.  Two search modes exist: ``mrv``
(smallest domain first) to decide existence fast, and ``lex`` (variables in
index order, values ascending) whose solutions come out in lexicographic
order.  ``solve`` combines them to return the lexicographically least
solution without paying for a fixed-order search on hard instances.
"""

from __future__ import annotations

import os
import time
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import SearchTimeout

TIMEOUT_ENV = "H1WB_TIMEOUT_MS"


class NodeLimit(Exception):
    """Raised when a search exceeds ``CSP.node_limit``."""


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def deadline_from_env() -> float | None:
    raw = os.environ.get(TIMEOUT_ENV)
    if not raw:
        return None
    return time.monotonic() + int(raw) / 1000.0


class _Relations:
    """Relation registry shared between a CSP and its copies."""

    def __init__(self):
        self.ids: dict[tuple, int] = {}
        self.tuples: list[tuple[tuple[int, ...], ...]] = []
        self.arity: list[int] = []
        # binary relations: per position, value -> mask of supporting values
        self.support: list[tuple[dict[int, int], dict[int, int]] | None] = []
        self.projected: dict[tuple[int, tuple[int, ...]], int] = {}
        self.memo: dict = {}

    def register(self, allowed: Iterable[Sequence[int]], arity: int) -> int:
        rows = frozenset(tuple(t) for t in allowed)
        key = (arity, rows)  # empty relations of different arity must not collide
        rid = self.ids.get(key)
        if rid is not None:
            return rid
        rid = len(self.tuples)
        self.ids[key] = rid
        self.tuples.append(tuple(sorted(rows)))
        self.arity.append(arity)
        if arity == 2:
            fwd: dict[int, int] = {}
            bwd: dict[int, int] = {}
            for a, b in rows:
                fwd[b] = fwd.get(b, 0) | (1 << a)
                bwd[a] = bwd.get(a, 0) | (1 << b)
            # support[rid][p][v]: values at position p compatible with v at the other
            self.support.append((fwd, bwd))
        else:
            self.support.append(None)
        return rid

    def project(self, rid: int, pattern: tuple[int, ...]) -> int:
        """Relation obtained by forcing equal entries where ``pattern`` repeats."""
        key = (rid, pattern)
        out = self.projected.get(key)
        if out is not None:
            return out
        width = max(pattern) + 1
        rows = set()
        for t in self.tuples[rid]:
            row = [None] * width
            ok = True
            for pos, slot in enumerate(pattern):
                if row[slot] is None:
                    row[slot] = t[pos]
                elif row[slot] != t[pos]:
                    ok = False
                    break
            if ok:
                rows.add(tuple(row))
        out = self.register(rows, width)
        self.projected[key] = out
        return out


class CSP:
    def __init__(self, domain_sizes: Sequence[int]):
        self.n = len(domain_sizes)
        self.init = [(1 << d) - 1 for d in domain_sizes]
        self.rels = _Relations()
        self.constraints: list[tuple[tuple[int, ...], int]] = []
        self.watch: list[list[int]] = [[] for _ in range(self.n)]
        self._seen: set[tuple[tuple[int, ...], int]] = set()
        self.ok = all(self.init)
        self.deadline: float | None = None
        self.node_limit: int | None = None
        self.nodes = 0

    def copy(self) -> "CSP":
        other = CSP.__new__(CSP)
        other.n = self.n
        other.init = list(self.init)
        other.rels = self.rels
        other.constraints = list(self.constraints)
        other.watch = [list(w) for w in self.watch]
        other._seen = set(self._seen)
        other.ok = self.ok
        other.deadline = self.deadline
        other.node_limit = self.node_limit
        other.nodes = 0
        return other

    # -- model building -------------------------------------------------

    def relation(self, allowed: Iterable[Sequence[int]], arity: int) -> int:
        return self.rels.register(allowed, arity)

    def restrict(self, var: int, values: Iterable[int]) -> None:
        mask = 0
        for v in values:
            mask |= 1 << v
        self.init[var] &= mask
        if not self.init[var]:
            self.ok = False

    def add(self, scope: Sequence[int], allowed: Iterable[Sequence[int]]) -> None:
        self.add_rel(scope, self.relation(allowed, len(scope)))

    def add_rel(self, scope: Sequence[int], rid: int) -> None:
        scope = tuple(scope)
        if len(set(scope)) < len(scope):
            slots: dict[int, int] = {}
            pattern = tuple(slots.setdefault(v, len(slots)) for v in scope)
            rid = self.rels.project(rid, pattern)
            scope = tuple(slots)
        if len(scope) == 1:
            self.restrict(scope[0], (t[0] for t in self.rels.tuples[rid]))
            return
        if not self.rels.tuples[rid]:
            self.ok = False
            return
        key = (scope, rid)
        if key in self._seen:
            return
        self._seen.add(key)
        ci = len(self.constraints)
        self.constraints.append(key)
        for v in scope:
            self.watch[v].append(ci)

    # -- propagation ----------------------------------------------------

    def _supported(self, rid: int, pos: int, doms: list[int], scope: tuple[int, ...]) -> int:
        rels = self.rels
        sup = rels.support[rid]
        if sup is not None:
            other = doms[scope[1 - pos]]
            key = (rid, pos, other)
            hit = rels.memo.get(key)
            if hit is not None:
                return hit
            table = sup[pos]
            mask = 0
            m = other
            while m:
                low = m & -m
                mask |= table.get(low.bit_length() - 1, 0)
                m ^= low
            if other.bit_length() <= 64:
                rels.memo[key] = mask
            return mask
        others = tuple(doms[v] for v in scope)
        key = (rid, pos, others[:pos] + others[pos + 1:])
        hit = rels.memo.get(key)
        if hit is not None:
            return hit
        mask = 0
        k = len(scope)
        for t in rels.tuples[rid]:
            for q in range(k):
                if q != pos and not (others[q] >> t[q]) & 1:
                    break
            else:
                mask |= 1 << t[pos]
        rels.memo[key] = mask
        return mask

    def propagate(self, doms: list[int], changed: Iterable[int]) -> bool:
        """Restore arc consistency in place; False on a wipe-out."""
        queue = list(changed)
        pending = set(queue)
        constraints = self.constraints
        watch = self.watch
        while queue:
            x = queue.pop()
            pending.discard(x)
            for ci in watch[x]:
                scope, rid = constraints[ci]
                for pos, y in enumerate(scope):
                    if y == x:
                        continue
                    old = doms[y]
                    new = old & self._supported(rid, pos, doms, scope)
                    if new != old:
                        if not new:
                            return False
                        doms[y] = new
                        if y not in pending:
                            pending.add(y)
                            queue.append(y)
        return True

    def _tick(self) -> None:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise NodeLimit(self.nodes)
        if self.deadline is not None and self.nodes % 64 == 0 and time.monotonic() > self.deadline:
            raise SearchTimeout("search exceeded %s" % TIMEOUT_ENV)

    # -- search -----------------------------------------------------------

    def _root(self, pins: dict[int, int] | None = None) -> list[int] | None:
        if not self.ok:
            return None
        doms = list(self.init)
        if pins:
            for v, val in pins.items():
                doms[v] &= 1 << val
                if not doms[v]:
                    return None
        if not self.propagate(doms, range(self.n)):
            return None
        return doms

    def root_domains(self, pins: dict[int, int] | None = None) -> list[int] | None:
        """Domains after pinning and propagation, or None on a wipe-out."""
        return self._root(pins)

    def entailed(self, doms: list[int]) -> bool:
        """True when every constraint allows every combination of ``doms``."""
        for scope, rid in self.constraints:
            need = 1
            for v in scope:
                need *= doms[v].bit_count()
            inside = sum(1 for t in self.rels.tuples[rid]
                         if all((doms[v] >> a) & 1 for v, a in zip(scope, t)))
            if inside != need:
                return False
        return True

    @staticmethod
    def _pick(doms: list[int], lex: bool) -> int | None:
        if lex:
            for v, m in enumerate(doms):
                if m & (m - 1):
                    return v
            return None
        best, best_size = None, 0
        for v, m in enumerate(doms):
            if m & (m - 1):
                size = m.bit_count()
                if best is None or size < best_size:
                    best, best_size = v, size
                    if size == 2:
                        break
        return best

    def _search(self, doms: list[int], lex: bool) -> Iterator[list[int]]:
        stack: list[tuple[list[int], int, list[int]]] = []
        node: list[int] | None = doms
        while True:
            if node is not None:
                self._tick()
                var = self._pick(node, lex)
                if var is None:
                    yield [m.bit_length() - 1 for m in node]
                else:
                    stack.append((node, var, bits(node[var])[::-1]))
                node = None
            while stack:
                parent, var, values = stack[-1]
                if not values:
                    stack.pop()
                    continue
                child = list(parent)
                child[var] = 1 << values.pop()
                if self.propagate(child, (var,)):
                    node = child
                    break
            if node is None:
                return

    def solutions(self, pins: dict[int, int] | None = None) -> Iterator[list[int]]:
        """All solutions in lexicographic order."""
        if self.deadline is None:
            self.deadline = deadline_from_env()
        doms = self._root(pins)
        if doms is None:
            return iter(())
        return self._search(doms, lex=True)

    def solve(self, pins: dict[int, int] | None = None, lex: bool = True) -> list[int] | None:
        """A solution, the lexicographically least one when ``lex`` is set."""
        if self.deadline is None:
            self.deadline = deadline_from_env()
        doms = self._root(pins)
        if doms is None:
            return None
        sol = next(self._search(list(doms), lex=False), None)
        if sol is None or not lex:
            return sol
        for v in range(self.n):
            if not doms[v] & (doms[v] - 1):
                continue
            improved = False
            for val in bits(doms[v]):
                if val >= sol[v]:
                    break
                trial = list(doms)
                trial[v] = 1 << val
                if not self.propagate(trial, (v,)):
                    continue
                found = next(self._search(list(trial), lex=False), None)
                if found is not None:
                    sol, doms, improved = found, trial, True
                    break
            if not improved:
                doms[v] = 1 << sol[v]
                if not self.propagate(doms, (v,)):
                    raise AssertionError("solver lost a known solution")
        return sol


class ArrayCSP:
    """Same contract as ``CSP`` for many constraints over a small common domain.

    Domains are a boolean matrix; constraints are grouped by relation and
    revised a whole group at a time with numpy.  After the first sweep only
    rows touching a changed variable are revisited.
    """

    def __init__(self, n: int, d: int):
        self.n, self.d = n, d
        self.init = np.ones((n, d), dtype=bool)
        self.rel_tuples: list[np.ndarray] = []
        self._rel_ids: dict[tuple, int] = {}
        self._projected: dict[tuple[int, tuple[int, ...]], int] = {}
        self.scopes: dict[int, list[np.ndarray]] = {}
        self._groups: list[tuple[np.ndarray, np.ndarray]] | None = None
        self.ok = n == 0 or d > 0
        self.deadline: float | None = None
        self.node_limit: int | None = None
        self.nodes = 0

    def copy(self) -> "ArrayCSP":
        other = ArrayCSP.__new__(ArrayCSP)
        other.__dict__.update(self.__dict__)
        other.init = self.init.copy()
        other.scopes = {rid: list(v) for rid, v in self.scopes.items()}
        other._groups = None
        other.nodes = 0
        return other

    # -- model building -------------------------------------------------

    def relation(self, allowed: Iterable[Sequence[int]], arity: int) -> int:
        rows = frozenset(tuple(t) for t in allowed)
        key = (arity, rows)
        rid = self._rel_ids.get(key)
        if rid is None:
            rid = self._rel_ids[key] = len(self.rel_tuples)
            self.rel_tuples.append(np.array(sorted(rows), dtype=np.int64).reshape(len(rows), arity))
        return rid

    def restrict(self, var: int, values: Iterable[int]) -> None:
        mask = np.zeros(self.d, dtype=bool)
        mask[list(values)] = True
        self.init[var] &= mask
        if not self.init[var].any():
            self.ok = False

    def add(self, scope: Sequence[int], allowed: Iterable[Sequence[int]]) -> None:
        self.add_rel(scope, self.relation(allowed, len(scope)))

    def add_rel(self, scope: Sequence[int], rid: int) -> None:
        self.add_rows(np.asarray([scope], dtype=np.int64), rid)

    def add_rows(self, rows: np.ndarray, rid: int) -> None:
        """Constrain every row of ``rows`` (shape m x k) by relation ``rid``."""
        rows = np.asarray(rows, dtype=np.int64)
        if not len(rows):
            return
        self._groups = None
        k = rows.shape[1]
        # pattern[i, j] = first position holding the same variable as position j
        pattern = np.tile(np.arange(k), (len(rows), 1))
        for j in range(k - 1, -1, -1):
            for j2 in range(j):
                hit = rows[:, j2] == rows[:, j]
                pattern[hit, j] = np.minimum(pattern[hit, j], j2)
        pats, inv = np.unique(pattern, axis=0, return_inverse=True)
        for p, pat in enumerate(pats.tolist()):
            sub = rows[inv.ravel() == p]
            keep = [j for j in range(k) if pat[j] == j]
            prid = rid if len(keep) == k else self._project(rid, tuple(pat), keep)
            tuples = self.rel_tuples[prid]
            if not len(tuples):
                self.ok = False
                return
            sub = sub[:, keep]
            if len(keep) == 1:
                mask = np.zeros(self.d, dtype=bool)
                mask[tuples[:, 0]] = True
                self.init[np.unique(sub[:, 0])] &= mask
                if not self.init[np.unique(sub[:, 0])].any(axis=1).all():
                    self.ok = False
                continue
            self.scopes.setdefault(prid, []).append(sub)

    def _project(self, rid: int, pattern: tuple[int, ...], keep: list[int]) -> int:
        key = (rid, pattern)
        if key not in self._projected:
            t = self.rel_tuples[rid]
            ok = np.all([t[:, j] == t[:, pattern[j]] for j in range(len(pattern))], axis=0)
            rows = t[ok][:, keep]
            self._projected[key] = self.relation(map(tuple, rows.tolist()), len(keep))
        return self._projected[key]

    def _finalize(self) -> list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
        """Per relation: scopes, tuples, and a variable -> rows index (order, pointers)."""
        if self._groups is None:
            self._groups = []
            for rid, parts in sorted(self.scopes.items()):
                scopes = np.unique(np.concatenate(parts), axis=0)
                flat = scopes.ravel()
                order = np.argsort(flat, kind="stable") // scopes.shape[1]
                ptr = np.searchsorted(flat[np.argsort(flat, kind="stable")], np.arange(self.n + 1))
                self._groups.append((scopes, self.rel_tuples[rid], order, ptr))
        return self._groups

    @staticmethod
    def _rows_of(changed: np.ndarray, scopes: np.ndarray, order: np.ndarray, ptr: np.ndarray) -> np.ndarray:
        vars_ = np.flatnonzero(changed)
        if len(vars_) > 64:
            return scopes[changed[scopes].any(axis=1)]
        picks = [order[ptr[v]:ptr[v + 1]] for v in vars_.tolist()]
        if not picks:
            return scopes[:0]
        return scopes[np.unique(np.concatenate(picks))]

    # -- propagation ----------------------------------------------------

    def _propagate(self, dom: np.ndarray, changed: np.ndarray | None) -> bool:
        d = self.d
        while True:
            touched = np.zeros(self.n, dtype=bool)
            for scopes, tuples, order, ptr in self._finalize():
                rows = scopes if changed is None else self._rows_of(changed, scopes, order, ptr)
                if not len(rows):
                    continue
                alive = np.ones((len(rows), len(tuples)), dtype=bool)
                for j in range(tuples.shape[1]):
                    alive &= dom[rows[:, j]][:, tuples[:, j]]
                for j in range(tuples.shape[1]):
                    col = tuples[:, j]
                    for val in range(d):
                        sel = col == val
                        sup = alive[:, sel].any(axis=1) if sel.any() else np.zeros(len(rows), dtype=bool)
                        dead = rows[~sup, j]
                        dead = dead[dom[dead, val]]
                        if len(dead):
                            dom[dead, val] = False
                            touched[dead] = True
            if not touched.any():
                return True
            if not dom[touched].any(axis=1).all():
                return False
            changed = touched

    def _tick(self) -> None:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise NodeLimit(self.nodes)
        if self.deadline is not None and self.nodes % 16 == 0 and time.monotonic() > self.deadline:
            raise SearchTimeout("search exceeded %s" % TIMEOUT_ENV)

    # -- search -----------------------------------------------------------

    def _root(self, pins: dict[int, int] | None = None) -> np.ndarray | None:
        if not self.ok:
            return None
        dom = self.init.copy()
        for v, val in (pins or {}).items():
            keep = dom[v, val]
            dom[v] = False
            dom[v, val] = keep
            if not keep:
                return None
        if not dom.any(axis=1).all() or not self._propagate(dom, None):
            return None
        return dom

    def root_domains(self, pins: dict[int, int] | None = None) -> list[int] | None:
        dom = self._root(pins)
        if dom is None:
            return None
        return [int(sum(1 << int(v) for v in np.flatnonzero(row))) for row in dom]

    def entailed(self, doms: list[int]) -> bool:
        dom = np.array([[(m >> v) & 1 for v in range(self.d)] for m in doms], dtype=bool).reshape(self.n, self.d)
        for scopes, tuples, _, _ in self._finalize():
            alive = np.ones((len(scopes), len(tuples)), dtype=bool)
            for j in range(tuples.shape[1]):
                alive &= dom[scopes[:, j]][:, tuples[:, j]]
            need = np.prod(dom[scopes].sum(axis=2), axis=1)
            if (alive.sum(axis=1) != need).any():
                return False
        return True

    def _search(self, dom: np.ndarray, lex: bool) -> Iterator[list[int]]:
        stack: list[tuple[np.ndarray, int, list[int]]] = []
        node: np.ndarray | None = dom
        while True:
            if node is not None:
                self._tick()
                sizes = node.sum(axis=1)
                open_ = np.flatnonzero(sizes > 1)
                if not len(open_):
                    yield node.argmax(axis=1).tolist()
                else:
                    var = int(open_[0] if lex else open_[np.argmin(sizes[open_])])
                    stack.append((node, var, np.flatnonzero(node[var]).tolist()[::-1]))
                node = None
            while stack:
                parent, var, values = stack[-1]
                if not values:
                    stack.pop()
                    continue
                child = parent.copy()
                child[var] = False
                child[var, values.pop()] = True
                hit = np.zeros(self.n, dtype=bool)
                hit[var] = True
                if self._propagate(child, hit):
                    node = child
                    break
            if node is None:
                return

    def solutions(self, pins: dict[int, int] | None = None) -> Iterator[list[int]]:
        """All solutions in lexicographic order."""
        if self.deadline is None:
            self.deadline = deadline_from_env()
        dom = self._root(pins)
        if dom is None:
            return iter(())
        return self._search(dom, lex=True)

    def solve(self, pins: dict[int, int] | None = None, lex: bool = True) -> list[int] | None:
        """A solution, the lexicographically least one when ``lex`` is set."""
        if self.deadline is None:
            self.deadline = deadline_from_env()
        dom = self._root(pins)
        if dom is None:
            return None
        sol = next(self._search(dom.copy(), lex=False), None)
        if sol is None or not lex:
            return sol
        for v in range(self.n):
            if dom[v].sum() < 2:
                continue
            improved = False
            for val in np.flatnonzero(dom[v]).tolist():
                if val >= sol[v]:
                    break
                trial = dom.copy()
                trial[v] = False
                trial[v, val] = True
                hit = np.zeros(self.n, dtype=bool)
                hit[v] = True
                if not self._propagate(trial, hit):
                    continue
                found = next(self._search(trial.copy(), lex=False), None)
                if found is not None:
                    sol, dom, improved = found, trial, True
                    break
            if not improved:
                dom[v] = False
                dom[v, sol[v]] = True
                hit = np.zeros(self.n, dtype=bool)
                hit[v] = True
                if not self._propagate(dom, hit):
                    raise AssertionError("solver lost a known solution")
        return sol
