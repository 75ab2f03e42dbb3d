"""Thresholds for the orbit-growth recursion.

With f(k) = 2^ceil(k^(1/m)) and exponents e_i = alpha(i) * |H_i|, step n
looks for k_n > alpha(n) such that

    sum_{i<=n} k^(e_i) < f(k)        for every k >= k_n

and sets alpha(n+1) = k_n + 1.  "For every k" is discharged with a
crossover argument: if s = ceil(k^(1/m)) then k <= s^m, so the sum is at
most n * s^(mE) with E = max e_i.  Once n * s^(mE) < 2^s and
((s+1)/s)^(mE) <= 2 hold at s0, they hold for all s >= s0, which covers
every k > (s0-1)^m.

Comparisons are exact while the integers stay below EXACT_BITS bits and
otherwise use rigorous interval bounds on log2 with directed rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpz

from .errors import BoundExceeded, InputError

EXACT_BITS = 1 << 22
PRECISIONS = (128, 512, 2048, 8192)

Terms = list[tuple[int, int, int]]  # coef * base ** exp


@dataclass(frozen=True)
class GrowthSpec:
    """f(k) = 2^ceil(k^(1/m))."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise InputError("root index m must be at least 1")

    def exponent(self, k: int) -> int:
        root, exact = gmpy2.iroot(mpz(k), self.m)
        return int(root) if exact else int(root) + 1

    def describe(self) -> str:
        return "2^ceil(k)" if self.m == 1 else f"2^ceil(k^(1/{self.m}))"

    @classmethod
    def parse(cls, text: str) -> "GrowthSpec":
        """Accepts 'sqrt', 'root:M' or a bare integer M."""
        text = text.strip()
        if text == "sqrt":
            return cls(2)
        if text.startswith("root:"):
            text = text[5:]
        try:
            return cls(int(text))
        except ValueError:
            raise InputError(f"unsupported growth function {text!r}") from None


@dataclass
class GrowthStep:
    n: int
    exponents: list[int]
    crossover: int  # s0
    k: int
    method: str
    spot_checks: list[int] = field(default_factory=list)


@dataclass
class GrowthPlan:
    spec: GrowthSpec
    sizes: list[int]
    alpha: list[int]
    thresholds: list[int]
    steps: list[GrowthStep]


def _bits(terms: Terms) -> int:
    return max((t[2] * mpz(t[1]).bit_length() + mpz(t[0]).bit_length() for t in terms), default=0)


def _exact(terms: Terms) -> mpz:
    return sum((mpz(c) * mpz(b) ** e for c, b, e in terms), mpz(0))


def _log2_bounds(terms: Terms, prec: int) -> tuple:
    """Lower and upper bounds on log2 of a sum of positive terms."""
    out = []
    for rnd in (gmpy2.RoundDown, gmpy2.RoundUp):
        with gmpy2.context(gmpy2.get_context(), precision=prec, round=rnd):
            logs = [gmpy2.log2(gmpy2.mpfr(c)) + gmpy2.mpfr(e) * gmpy2.log2(gmpy2.mpfr(b)) for c, b, e in terms]
            top = max(logs)
            if rnd is gmpy2.RoundDown:
                out.append(top)
            else:
                out.append(top + gmpy2.log2(sum(gmpy2.exp2(x - top) for x in logs)))
    return out[0], out[1]


def compare(lhs: Terms, rhs: Terms) -> int:
    """Sign of sum(lhs) - sum(rhs) for positive terms coef * base ** exp."""
    lhs = [t for t in lhs if t[0]]
    rhs = [t for t in rhs if t[0]]
    if not lhs or not rhs:
        return (1 if lhs else 0) - (1 if rhs else 0)
    if max(_bits(lhs), _bits(rhs)) <= EXACT_BITS:
        a, b = _exact(lhs), _exact(rhs)
        return (a > b) - (a < b)
    for prec in PRECISIONS:
        llo, lhi = _log2_bounds(lhs, prec)
        rlo, rhi = _log2_bounds(rhs, prec)
        if lhi < rlo:
            return -1
        if llo > rhi:
            return 1
    raise BoundExceeded("comparison undecided at the highest precision")


def inequality_holds(k: int, exponents: list[int], spec: GrowthSpec) -> bool:
    """sum k^e_i < 2^ceil(k^(1/m))."""
    return compare([(1, k, e) for e in exponents], [(1, 2, spec.exponent(k))]) < 0


def _least(pred, lo: int) -> int:
    """Least s >= lo with pred(s), for pred monotone from false to true."""
    if pred(lo):
        return lo
    step = 1
    while not pred(lo + step):
        step *= 2
    a, b = lo + step // 2, lo + step  # pred(a) false (or a == lo), pred(b) true
    while b - a > 1:
        mid = (a + b) // 2
        if pred(mid):
            b = mid
        else:
            a = mid
    return b


def crossover(count: int, top: int, m: int) -> int:
    """Least s0 with ((s+1)/s)^(mE) <= 2 and count * s^(mE) < 2^s."""
    me = m * top
    s_b = _least(lambda s: compare([(1, s + 1, me)], [(2, s, me)]) <= 0, 1)
    return _least(lambda s: compare([(count, s, me)], [(1, 2, s)]) < 0, s_b)


def compute_alpha(spec: GrowthSpec, sizes: list[int], n: int, k_max: int = 10 ** 60,
                  spot: int = 6) -> GrowthPlan:
    if n < 1 or len(sizes) < n:
        raise InputError(f"need at least {n} graph sizes, got {len(sizes)}")
    if any(s < 1 for s in sizes):
        raise InputError("graph sizes must be positive")
    alpha = [1]
    thresholds = []
    steps = []
    for j in range(1, n + 1):
        exps = [alpha[i] * sizes[i] for i in range(j)]
        s0 = crossover(j, max(exps), spec.m)
        k = max(alpha[-1] + 1, (s0 - 1) ** spec.m + 1)
        if k > k_max:
            raise BoundExceeded(f"step {j}: threshold {k} exceeds k_max = {k_max}")
        if not inequality_holds(k, exps, spec):
            raise AssertionError(f"crossover argument failed at step {j}")
        checks = [k]
        probe = k
        while len(checks) < spot and probe * 2 <= k_max:
            probe *= 2
            checks.append(probe)
        if k + 1 <= k_max:
            checks.insert(1, k + 1)
        for c in checks:
            if not inequality_holds(c, exps, spec):
                raise AssertionError(f"spot check failed at k = {c}")
        method = "exact" if _bits([(1, k, max(exps))]) <= EXACT_BITS else "interval"
        steps.append(GrowthStep(j, exps, s0, k, method, checks))
        thresholds.append(k)
        alpha.append(k + 1)
    return GrowthPlan(spec, list(sizes[:n]), alpha, thresholds, steps)
