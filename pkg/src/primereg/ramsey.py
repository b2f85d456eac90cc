"""Regularity verdicts for a_1 h(x_1) + ... + a_s h(x_s) = b over primes, and solution counting."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .distributions import ValueDist, count_equal, sum_of
from .errors import DomainError, GuardError
from .intersective import IntersectivityVerdict, is_intersective_second_kind, obstruction_witness
from .numtheory import phi, sieve_primes
from .poly import IntPoly

MAX_SUBSET_TERMS = 30
MAX_PARTITION_TERMS = 8


@dataclass(frozen=True)
class EquationSpec:
    a: tuple[int, ...]
    b: int
    h: IntPoly

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if not self.a:
            raise DomainError("at least one coefficient is required")
        if any(x == 0 for x in self.a):
            raise DomainError("coefficients must be nonzero")
        if self.h.degree < 1:
            raise DomainError("h must have degree >= 1")

    @property
    def s(self) -> int:
        return len(self.a)

    def to_dict(self) -> dict:
        return {"a": list(self.a), "b": self.b, "h": list(self.h.coeffs)}


@dataclass
class RegularityVerdict:
    pr: bool
    dr: bool
    I: tuple[int, ...] | None = None  # 1-based indices
    m: int | None = None
    reason: str = ""
    intersectivity: IntersectivityVerdict | None = None

    def to_dict(self) -> dict:
        out = {"pr": "yes" if self.pr else "no", "dr": "yes" if self.dr else "no", "reason": self.reason}
        if self.I is not None:
            out["I"] = list(self.I)
        if self.m is not None:
            out["m"] = self.m
        if self.intersectivity is not None:
            out["intersectivity"] = self.intersectivity.to_dict(include_certs=False)
        return out


# --------------------------------------------------------------------------
# zero-sum subsets


def _half_sums(items: Sequence[tuple[int, int]]) -> dict[int, tuple[int, ...]]:
    """For each subset sum over nonempty subsets, the smallest subset (by size, then indices)."""
    best: dict[int, tuple[int, ...]] = {}
    for r in range(1, len(items) + 1):
        for combo in itertools.combinations(items, r):
            s = sum(c for _, c in combo)
            if s not in best:
                best[s] = tuple(i for i, _ in combo)
    return best


def zero_sum_subset(a: Sequence[int]) -> tuple[int, ...] | None:
    """A nonempty I with sum_{i in I} a_i = 0 (0-based, smallest size found), by meet in the middle."""
    if len(a) > MAX_SUBSET_TERMS:
        raise GuardError(f"subset search limited to {MAX_SUBSET_TERMS} coefficients")
    items = list(enumerate(a))
    k = len(items) // 2
    left, right = _half_sums(items[:k]), _half_sums(items[k:])
    cands = []
    if 0 in left:
        cands.append(left[0])
    if 0 in right:
        cands.append(right[0])
    for s, I in left.items():
        J = right.get(-s)
        if J is not None:
            cands.append(I + J)
    if not cands:
        return None
    return min(cands, key=lambda t: (len(t), t))


def pr_verdict(spec: EquationSpec, B: int = 10**5, threads: int = 1) -> RegularityVerdict:
    a, b, h = spec.a, spec.b, spec.h
    if len(a) > MAX_SUBSET_TERMS:
        raise GuardError(f"at most {MAX_SUBSET_TERMS} coefficients are supported")
    S = sum(a)
    dr = dr_verdict(spec)
    if S == 0:
        if b != 0:
            return RegularityVerdict(False, dr, reason="coefficients sum to zero but b is nonzero")
        m = h(1)
        sub = is_intersective_second_kind(h - m, B, threads=threads)
        return RegularityVerdict(True, dr, tuple(range(1, len(a) + 1)), m, "all coefficients, m = h(1)", sub)
    if b % S:
        return RegularityVerdict(False, dr, reason=f"b = {b} is not a multiple of sum(a) = {S}")
    m = b // S
    I = zero_sum_subset(a)
    if I is None:
        return RegularityVerdict(False, dr, m=m, reason="no nonempty zero-sum subset of coefficients")
    I1 = tuple(i + 1 for i in I)
    sub = is_intersective_second_kind(h - m, B, threads=threads)
    if not sub.is_yes:
        return RegularityVerdict(
            False, dr, I1, m, f"h(x) - {m} is not intersective of the second kind (witness {sub.witness})", sub
        )
    return RegularityVerdict(True, dr, I1, m, "zero-sum subset and intersective shift", sub)


def dr_verdict(spec: EquationSpec) -> bool:
    return spec.b == 0 and sum(spec.a) == 0


@dataclass(frozen=True)
class ThresholdReport:
    d: int
    T_upper: int
    s0_upper: int
    s0_lower: int

    def to_dict(self) -> dict:
        return {"d": self.d, "T_upper": self.T_upper, "s0_upper": self.s0_upper, "s0_lower": self.s0_lower}


def s0_threshold(d: int) -> ThresholdReport:
    if d < 2:
        raise DomainError("d must be >= 2")
    T = {2: 2, 3: 4}.get(d, d * (d - 1) // 2 + math.isqrt(2 * d + 2))
    return ThresholdReport(d, T, 2 * T + 1, 2 * d + 1)


# --------------------------------------------------------------------------
# counting


def set_partitions(n: int) -> Iterable[list[list[int]]]:
    """All set partitions of range(n) (restricted growth strings)."""
    if n == 0:
        yield []
        return

    def rec(i: int, blocks: list[list[int]]):
        if i == n:
            yield [list(b) for b in blocks]
            return
        for blk in blocks:
            blk.append(i)
            yield from rec(i + 1, blocks)
            blk.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


def _mobius(blocks: list[list[int]]) -> int:
    out = 1
    for blk in blocks:
        k = len(blk)
        out *= (-1) ** (k - 1) * math.factorial(k - 1)
    return out


class _TupleCounter:
    """Counts tuples in A^k with sum c_j h(y_j) = b, no distinctness, caching by coefficient multiset."""

    def __init__(self, A: Sequence[int], h: IntPoly, budget: int):
        self.n = len(A)
        self.hv = [h(int(p)) for p in A]
        self.budget = budget
        self.hmax = max((abs(v) for v in self.hv), default=0)
        self._dists: dict[tuple[int, ...], ValueDist] = {}

    def _dist(self, cs: tuple[int, ...]) -> ValueDist:
        if cs not in self._dists:
            if sum(abs(c) for c in cs) * self.hmax >= (1 << 62):
                raise GuardError("polynomial values overflow 62 bits; reduce the range")
            parts = [ValueDist.from_values([c * v for v in self.hv]) for c in cs]
            self._dists[cs] = sum_of(parts, budget=self.budget)
        return self._dists[cs]

    def count(self, coeffs: Sequence[int], b: int) -> int:
        free = sum(1 for c in coeffs if c == 0)
        cs = sorted(c for c in coeffs if c != 0)
        factor = self.n**free
        if not cs:
            return factor if b == 0 else 0
        if self.n == 0:
            return 0
        k = (len(cs) + 1) // 2
        left, right = tuple(cs[:k]), tuple(cs[k:])
        if not right:
            d = self._dist(left)
            i = np.searchsorted(d.values, b)
            hit = int(d.weights[i]) if i < len(d) and d.values[i] == b else 0
            return factor * hit
        return factor * int(count_equal(self._dist(left), self._dist(right), b))


def count_solutions(A: Iterable[int], spec: EquationSpec, budget: int = 2 << 30) -> int:
    """Exact number of pairwise-distinct s-tuples from A solving the equation (right side spec.b)."""
    A = sorted(set(int(x) for x in A))
    s = spec.s
    if len(A) < s:
        return 0
    if s > MAX_PARTITION_TERMS:
        return count_solutions_brute(A, spec)
    tc = _TupleCounter(A, spec.h, budget)
    total = 0
    cache: dict[tuple[int, ...], int] = {}
    for blocks in set_partitions(s):
        merged = tuple(sorted(sum(spec.a[i] for i in blk) for blk in blocks))
        if merged not in cache:
            cache[merged] = tc.count(merged, spec.b)
        total += _mobius(blocks) * cache[merged]
    return total


def count_all_tuples(A: Iterable[int], spec: EquationSpec, budget: int = 2 << 30) -> int:
    """Number of s-tuples from A (repetition allowed) solving the equation."""
    A = sorted(set(int(x) for x in A))
    return _TupleCounter(A, spec.h, budget).count(spec.a, spec.b)


def count_nonconstant(A: Iterable[int], spec: EquationSpec) -> int:
    """Solutions that are not of the form (x, ..., x)."""
    A = sorted(set(int(x) for x in A))
    S = sum(spec.a)
    constant = sum(1 for x in A if S * spec.h(x) == spec.b)
    return count_all_tuples(A, spec) - constant


def count_solutions_brute(A: Iterable[int], spec: EquationSpec, limit: int = 10**8) -> int:
    """Oracle: enumerate ordered tuples of distinct elements."""
    A = sorted(set(int(x) for x in A))
    s = spec.s
    if len(A) < s:
        return 0
    if math.perm(len(A), s) > limit:
        raise GuardError("brute-force enumeration too large")
    hv = np.array([spec.h(x) for x in A], dtype=object if abs(spec.h(A[-1])) > 1 << 50 else np.int64)
    perms = np.array(list(itertools.permutations(range(s))), dtype=np.int64)
    a = np.array(spec.a, dtype=hv.dtype)
    total = 0
    for combo in itertools.combinations(range(len(A)), s):
        vals = hv[list(combo)][perms]
        total += int(np.count_nonzero(vals.dot(a) == spec.b))
    return total


# --------------------------------------------------------------------------
# colourings and experiments


@dataclass(frozen=True)
class Coloring:
    r: int
    policy: str = "random"  # random | residue | blocks | explicit
    seed: int = 0
    modulus: int = 2
    assignment: tuple[tuple[int, int], ...] = ()

    def assign(self, primes: np.ndarray, N: int) -> np.ndarray:
        primes = np.asarray(primes, dtype=np.int64)
        if self.policy == "random":
            return np.random.default_rng(self.seed).integers(0, self.r, len(primes))
        if self.policy == "residue":
            return (primes % self.modulus) % self.r
        if self.policy == "blocks":
            return np.minimum((primes - 1) * self.r // max(N, 1), self.r - 1)
        if self.policy == "explicit":
            table = dict(self.assignment)
            missing = [int(p) for p in primes if int(p) not in table]
            if missing:
                raise DomainError(f"explicit colouring misses primes such as {missing[:3]}")
            return np.array([table[int(p)] for p in primes], dtype=np.int64)
        raise DomainError(f"unknown colouring policy {self.policy!r}")

    @classmethod
    def from_dict(cls, d: dict) -> Coloring:
        pairs = tuple(sorted((int(k), int(v)) for k, v in d.get("assignment", {}).items()))
        r = int(d.get("r", 1 + max((v for _, v in pairs), default=0)))
        return cls(r, d.get("policy", "explicit" if pairs else "random"), int(d.get("seed", 0)), int(d.get("modulus", 2)), pairs)

    def to_dict(self) -> dict:
        out = {"r": self.r, "policy": self.policy, "seed": self.seed, "modulus": self.modulus}
        if self.assignment:
            out["assignment"] = {str(k): v for k, v in self.assignment}
        return out


def scaling_ratio(count: int, N: int, d: int, s: int) -> float:
    """count * N^d * (log N / N)^s."""
    L = math.log(N)
    return count * math.exp(d * math.log(N) + s * (math.log(L) - math.log(N)))


@dataclass
class ColorReport:
    N: int
    counts: list[int]
    nonconstant: list[int]
    best: int
    ratio: float

    def to_dict(self) -> dict:
        return {"N": self.N, "counts": self.counts, "nonconstant": self.nonconstant, "best": self.best, "ratio": self.ratio}


def color_experiment(N: int, coloring: Coloring, spec: EquationSpec) -> ColorReport:
    ps = sieve_primes(max(N, 2)).upto(N)
    colors = coloring.assign(ps, N)
    counts, nonconst = [], []
    for k in range(coloring.r):
        cls = ps[colors == k]
        counts.append(count_solutions(cls, spec))
        nonconst.append(count_nonconstant(cls, spec) if len(cls) else 0)
    best = int(np.argmax(counts)) if counts else 0
    return ColorReport(N, counts, nonconst, best, scaling_ratio(counts[best], N, spec.h.degree, spec.s))


def select_dense(N: int, delta: float, policy: str = "random", seed: int = 0) -> np.ndarray:
    ps = sieve_primes(max(N, 2)).upto(N)
    size = math.ceil(delta * len(ps) - 1e-12)
    if policy == "random":
        idx = np.sort(np.random.default_rng(seed).choice(len(ps), size=size, replace=False))
        return ps[idx]
    if policy == "top":
        return ps[len(ps) - size :]
    if policy == "ap":
        # primes = 1 (mod m) for the least m >= 3 whose class has relative density <= delta
        m = 3
        while 1 / phi(m) > delta and m < 10**6:
            m += 1
        return ps[ps % m == 1]
    raise DomainError(f"unknown selection policy {policy!r}")


@dataclass
class DenseReport:
    N: int
    size: int
    count: int
    ratio: float

    def to_dict(self) -> dict:
        return {"N": self.N, "size": self.size, "count": self.count, "ratio": self.ratio}


def dense_experiment(N: int, delta: float, spec: EquationSpec, policy: str = "random", seed: int = 0) -> DenseReport:
    A = select_dense(N, delta, policy, seed)
    c = count_solutions(A, spec)
    return DenseReport(N, len(A), c, scaling_ratio(c, N, spec.h.degree, spec.s))


@dataclass
class Ladder:
    rows: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def spread(self) -> float:
        r = [x[2] for x in self.rows if x[2] > 0]
        if len(r) < len(self.rows) or not r:
            return math.inf
        return max(r) / min(r)

    def passed(self, factor: float = 4.0) -> bool:
        return self.spread <= factor

    def to_csv(self) -> str:
        lines = ["N,count,ratio"] + [f"{n},{c},{r:.12g}" for n, c, r in self.rows]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"rows": [{"N": n, "count": c, "ratio": r} for n, c, r in self.rows], "spread": self.spread}


def scaling_ladder(Ns: Sequence[int], spec: EquationSpec) -> Ladder:
    out = Ladder()
    for N in Ns:
        c = count_solutions(sieve_primes(max(N, 2)).upto(N), spec)
        out.rows.append((N, c, scaling_ratio(c, N, spec.h.degree, spec.s)))
    return out


def obstruction_check(spec: EquationSpec, N: int, search_bound: int = 1000) -> tuple[int | None, list[int]]:
    """Witness n from the obstruction search and nonconstant counts per class of the mod-n colouring of primes <= N."""
    n = obstruction_witness(spec.a, spec.b, spec.h, search_bound)
    if n is None:
        return None, []
    rep = color_experiment(N, Coloring(n, "residue", modulus=n), spec)
    return n, rep.nonconstant
