"""Prime polynomial Bohr sets: enumeration, density floors, Harman search, low major arcs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
import numpy as np

from .errors import DomainError, GuardError
from .expsums import phase_residues, residues_to_unit
from .intersective import aux_poly
from .numtheory import cf_approx, dist_to_int, phi, sieve_primes, to_fraction
from .parallel import map_chunks, tree_sum
from .poly import IntPoly

HARMAN_LIMIT = 10**6


@dataclass(frozen=True)
class BohrSpec:
    h: IntPoly
    alpha: tuple[Fraction, ...]
    rho: Fraction
    P: int
    D: int = 1
    policy: str = "canonical"

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(to_fraction(a) for a in self.alpha))
        object.__setattr__(self, "rho", to_fraction(self.rho))
        if not 0 < self.rho < 1:
            raise DomainError("rho must lie in (0, 1)")
        if len(self.alpha) < 1:
            raise DomainError("alpha needs at least one coordinate")

    @property
    def K(self) -> int:
        return len(self.alpha)

    def aux(self):
        return aux_poly(self.h, self.D, self.policy)

    def to_dict(self) -> dict:
        a = self.aux()
        return {
            "h": list(self.h.coeffs), "D": self.D, "lambda": a.lam, "r_D": a.r_D,
            "alpha": [str(x) for x in self.alpha], "rho": str(self.rho), "P": self.P,
        }


@dataclass
class BohrCensus:
    member_count: int
    log_mass: float
    complement_count: int
    complement_log_mass: float
    eligible_count: int
    eligible_log_mass: float
    members: np.ndarray = field(repr=False)
    complement: np.ndarray = field(repr=False)

    def partition_ok(self) -> bool:
        return (
            self.member_count + self.complement_count == self.eligible_count
            and math.isclose(self.log_mass + self.complement_log_mass, self.eligible_log_mass, rel_tol=1e-12, abs_tol=1e-9)
        )

    def to_dict(self) -> dict:
        return {
            "member_count": self.member_count, "log_mass": self.log_mass,
            "complement_count": self.complement_count, "complement_log_mass": self.complement_log_mass,
            "eligible_count": self.eligible_count, "eligible_log_mass": self.eligible_log_mass,
        }


def eligible_primes(spec: BohrSpec) -> np.ndarray:
    if spec.P < 2:
        return np.empty(0, dtype=np.int64)
    a = spec.aux()
    return sieve_primes(spec.P).in_progression(spec.D, a.r_D, hi=spec.P)


def _near(res, den: int, rho: Fraction) -> np.ndarray:
    """Exact test ||res/den|| < rho for each residue."""
    if isinstance(res, np.ndarray) and den * max(rho.denominator, rho.numerator) < (1 << 62):
        d = np.minimum(res, den - res)
        return d * rho.denominator < rho.numerator * den
    return np.array([min(r, den - r) * rho.denominator < rho.numerator * den for r in map(int, res)], dtype=bool)


def membership(spec: BohrSpec, ps: np.ndarray) -> np.ndarray:
    lam = spec.aux().lam
    inside = np.ones(len(ps), dtype=bool)
    for a in spec.alpha:
        res, den = phase_residues(spec.h, a / lam, ps)
        inside &= _near(res, den, spec.rho)
    return inside


def bohr_enumerate(spec: BohrSpec, threads: int = 1, chunk: int = 1 << 16) -> BohrCensus:
    ps = eligible_primes(spec)
    parts = map_chunks(lambda lo, hi: membership(spec, ps[lo:hi]), len(ps), chunk, threads)
    inside = np.concatenate(parts) if parts else np.empty(0, dtype=bool)
    logs = np.log(ps.astype(np.float64))
    mem, comp = ps[inside], ps[~inside]
    return BohrCensus(
        len(mem), float(logs[inside].sum()), len(comp), float(logs[~inside].sum()),
        len(ps), float(logs.sum()), mem, comp,
    )


# --------------------------------------------------------------------------
# density floors


def delta_exponent(K: int, d: int, eps: float = 0):
    """Exponent E(K) of the density floor rho^E: E(1) = d+3, E(K) = 3 + K d + 2 E(K-1)."""
    if K < 1:
        raise DomainError("K must be >= 1")
    E = d + 3 + eps
    for k in range(2, K + 1):
        E = 3 + k * (d + eps) + 2 * E
    return E


@dataclass
class DensityReport:
    measured: float
    floor: float
    exponent: float
    passed: bool

    def to_dict(self) -> dict:
        return {"measured": self.measured, "floor": self.floor, "exponent": self.exponent, "pass": self.passed}


def density_certificate(spec: BohrSpec, eps: float = 0, census: BohrCensus | None = None, threads: int = 1) -> DensityReport:
    census = census or bohr_enumerate(spec, threads)
    measured = census.log_mass * phi(spec.D) / spec.P
    E = delta_exponent(spec.K, spec.h.degree, eps)
    floor = float(spec.rho) ** E
    return DensityReport(measured, floor, E, measured >= floor)


# --------------------------------------------------------------------------
# Harman dichotomy


@dataclass
class HarmanWitness:
    m: tuple[int, ...]
    sum_value: complex
    lhs: float
    rhs: float
    inequality_holds: bool
    degenerate: bool = False
    candidates: int = 0

    def to_dict(self) -> dict:
        return {
            "m": list(self.m), "sum": [self.sum_value.real, self.sum_value.imag], "lhs": self.lhs,
            "rhs": self.rhs, "inequality_holds": self.inequality_holds, "degenerate": self.degenerate,
            "candidates": self.candidates,
        }


def harman_box(K: int, rho: Fraction) -> list[tuple[int, ...]]:
    R = math.floor(K / to_fraction(rho))
    if (2 * R + 1) ** K - 1 > HARMAN_LIMIT:
        raise GuardError(f"lattice box has {(2 * R + 1) ** K - 1} candidates, limit is {HARMAN_LIMIT}")
    box = [m for m in itertools.product(range(-R, R + 1), repeat=K) if any(m)]
    # smallest sup-norm first, then lexicographic; the argmax takes the first maximiser in this order
    box.sort(key=lambda m: (max(map(abs, m)), m))
    return box


def harman_search(spec: BohrSpec, census: BohrCensus | None = None, threads: int = 1) -> HarmanWitness:
    """Exhaustive search of the box 0 < |m|_inf <= K/rho for the largest complement sum."""
    census = census or bohr_enumerate(spec, threads)
    K = spec.K
    box = harman_box(K, spec.rho)
    C = census.complement
    if len(C) == 0:
        return HarmanWitness(box[0] if box else (0,) * K, 0j, 0.0, 0.0, True, True, len(box))
    lam = spec.aux().lam
    logs = np.log(C.astype(np.float64))

    def value(m: tuple[int, ...]) -> complex:
        phase = sum((mi * a for mi, a in zip(m, spec.alpha)), Fraction(0)) / lam
        res, den = phase_residues(spec.h, phase, C)
        return complex(np.dot(residues_to_unit(res, den), logs))

    def block(lo: int, hi: int):
        return [value(m) for m in box[lo:hi]]

    sums = [s for part in map_chunks(block, len(box), 256, threads) for s in part]
    mags = np.array([abs(s) for s in sums])
    top = mags.max()
    best = min(i for i in range(len(box)) if mags[i] >= top * (1 - 1e-12))
    lhs = (2 * K + 1) ** K * mags[best]
    rhs = float(spec.rho) ** K / (4 * K * K - 1) * float(tree_sum(list(logs)))
    return HarmanWitness(box[best], sums[best], float(lhs), rhs, bool(lhs >= rhs), False, len(box))


# --------------------------------------------------------------------------
# low major arc


@dataclass
class LowMajorArc:
    q: int
    a: int
    gap: float
    Qmax: int
    q_bound_ok: bool
    gap_bound_ok: bool

    @property
    def ok(self) -> bool:
        return self.q_bound_ok and self.gap_bound_ok

    def to_dict(self) -> dict:
        return {"q": self.q, "a": self.a, "gap": self.gap, "Qmax": self.Qmax,
                "q_bound_ok": self.q_bound_ok, "gap_bound_ok": self.gap_bound_ok, "ok": self.ok}


def low_major_arc(theta, L: int, P: int, d: int, lam: int = 1) -> LowMajorArc:
    """Best convergent with q <= L^(d+1); bounds q <= L^d and ||q theta|| <= q L^d lam / P^d checked with constant 1."""
    t = to_fraction(theta)
    Qmax = L ** (d + 1)
    r = cf_approx(t, Qmax)
    gap = dist_to_int(r.q * t)
    return LowMajorArc(
        r.q, r.a, float(gap), Qmax,
        r.q <= L**d,
        gap <= Fraction(r.q * L**d * lam, P**d),
    )


def random_alpha(rng: np.random.Generator, K: int, bits: int = 40) -> tuple[Fraction, ...]:
    """K random phases k/2^bits; dyadic so every phase stays exact."""
    return tuple(Fraction(int(rng.integers(0, 1 << bits)), 1 << bits) for _ in range(K))
