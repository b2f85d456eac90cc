"""Exact arithmetic foundations: sieving, CRT, continued fractions, li."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Iterator, NamedTuple, Sequence

import numpy as np
from sympy import factorint as _sympy_factorint

from ._backend import kernels
from .errors import DomainError, EmptyTableError, InconsistentCongruences
from .poly import IntPoly

# --------------------------------------------------------------------------
# primes


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit`` as an ascending int64 array."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def __contains__(self, n: int) -> bool:
        i = np.searchsorted(self.primes, n)
        return bool(i < len(self.primes) and self.primes[i] == n)

    def upto(self, x: float) -> np.ndarray:
        return self.primes[: np.searchsorted(self.primes, x, side="right")]

    def in_progression(self, m: int, b: int, lo: float = 0, hi: float | None = None) -> np.ndarray:
        """Primes p with lo < p <= hi and p = b (mod m)."""
        ps = self.primes
        if hi is not None:
            ps = ps[: np.searchsorted(ps, hi, side="right")]
        if lo > 0:
            ps = ps[np.searchsorted(ps, lo, side="right") :]
        if m == 1:
            return ps
        return ps[ps % m == b % m]

    def theta(self, x: float | None = None) -> float:
        """Chebyshev theta: sum of log p over p <= x."""
        ps = self.primes if x is None else self.upto(x)
        return float(np.log(ps.astype(np.float64)).sum())


_sieve_lock = threading.Lock()
_sieve_cache: PrimeTable | None = None


def sieve_primes(limit: int) -> PrimeTable:
    """Complete table of primes <= limit. Larger tables are cached and sliced."""
    global _sieve_cache
    limit = int(limit)
    if limit < 2:
        raise EmptyTableError(f"no primes below {limit}")
    with _sieve_lock:
        cached = _sieve_cache
        if cached is None or cached.limit < limit:
            cached = PrimeTable(limit, kernels.sieve(limit))
            cached.primes.setflags(write=False)
            _sieve_cache = cached
    if cached.limit == limit:
        return cached
    return PrimeTable(limit, cached.upto(limit))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=4096)
def factorint(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of |n| as sorted (p, e) pairs."""
    n = abs(int(n))
    if n == 0:
        raise DomainError("cannot factor 0")
    return tuple(sorted(_sympy_factorint(n).items()))


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorint(n)]


def valuation(n: int, p: int) -> int:
    """p-adic valuation; the valuation of 0 is reported as a large sentinel."""
    if n == 0:
        return 10**9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def phi(n: int) -> int:
    r = n
    for p, _ in factorint(n):
        r = r // p * (p - 1)
    return r


def radical(n: int) -> int:
    return math.prod(prime_divisors(n)) if n != 1 else 1


def omega(n: int) -> int:
    return len(factorint(n)) if n != 1 else 0


# --------------------------------------------------------------------------
# congruences


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    g = math.gcd(m1, m2)
    if (r2 - r1) % g:
        raise InconsistentCongruences(f"{r1} mod {m1} and {r2} mod {m2} are incompatible")
    l = m1 // g * m2
    if m1 == 1:
        return r2 % m2, m2
    t = ((r2 - r1) // g) * pow(m1 // g, -1, m2 // g) % (m2 // g) if m2 // g > 1 else 0
    return (r1 + m1 * t) % l, l


def crt_solve(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Least nonnegative x with x = r_i (mod m_i) for all i.

    Moduli need not be coprime as long as the congruences are consistent.
    """
    if len(residues) != len(moduli):
        raise DomainError("residues and moduli differ in length")
    r, m = 0, 1
    for ri, mi in zip(residues, moduli):
        if mi <= 0:
            raise DomainError("moduli must be positive")
        r, m = crt_pair(r, m, int(ri) % mi, int(mi))
    return r


def gcd_dth_power_part(H: int, W: int, d: int) -> int:
    """Largest m with m**d dividing gcd(H, W)."""
    if d < 1:
        raise DomainError("d must be positive")
    g = math.gcd(H, W)
    if g == 0:
        raise DomainError("gcd(H, W) = 0 has no largest d-th power divisor")
    return math.prod(p ** (e // d) for p, e in factorint(g))


# --------------------------------------------------------------------------
# continued fractions


class Rational(NamedTuple):
    """Reduced fraction a/q with q >= 1."""

    a: int
    q: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.a, self.q)

    def __float__(self) -> float:
        return self.a / self.q


def to_fraction(theta) -> Fraction:
    """Exact rational value of a real-like input (floats convert exactly)."""
    if isinstance(theta, Fraction):
        return theta
    if isinstance(theta, (int, _RationalABC)):
        return Fraction(theta)
    if isinstance(theta, str):
        return Fraction(theta)
    if hasattr(theta, "as_integer_ratio"):
        return Fraction(*theta.as_integer_ratio())
    # mpmath and friends
    return Fraction(str(theta))


def convergents(theta) -> Iterator[Rational]:
    """Continued-fraction convergents of theta (finite, since the input is rational)."""
    x = to_fraction(theta)
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Rational(h1, k1)
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def cf_approx(theta, Qmax: int) -> Rational:
    """Convergent a/q with q <= Qmax minimising |q*theta - a| (ties to smaller q)."""
    if Qmax < 1:
        raise DomainError("Qmax must be >= 1")
    t = to_fraction(theta)
    best: Rational | None = None
    best_err: Fraction | None = None
    for c in convergents(t):
        if c.q > Qmax:
            break
        err = abs(c.q * t - c.a)
        if best_err is None or err < best_err:
            best, best_err = c, err
    assert best is not None  # the first convergent has q = 1
    return best


def dist_to_int(x: Fraction) -> Fraction:
    """Exact distance to the nearest integer."""
    f = x - math.floor(x)
    return min(f, 1 - f)


# --------------------------------------------------------------------------
# logarithmic integral


def _simpson(f, a: float, b: float, tol: float) -> float:
    c = 0.5 * (a + b)
    fa, fb, fc = f(a), f(b), f(c)
    whole = (b - a) / 6.0 * (fa + 4 * fc + fb)
    stack = [(a, b, fa, fb, fc, whole, tol, 0)]
    total = 0.0
    while stack:
        a, b, fa, fb, fc, whole, tol, depth = stack.pop()
        c = 0.5 * (a + b)
        d, e = 0.5 * (a + c), 0.5 * (c + b)
        fd, fe = f(d), f(e)
        left = (c - a) / 6.0 * (fa + 4 * fd + fc)
        right = (b - c) / 6.0 * (fc + 4 * fe + fb)
        diff = left + right - whole
        if abs(diff) <= 15 * tol or depth > 50:
            total += left + right + diff / 15.0
        else:
            stack.append((a, c, fa, fc, fd, left, tol / 2, depth + 1))
            stack.append((c, b, fc, fb, fe, right, tol / 2, depth + 1))
    return total


def li(x: float, rtol: float = 1e-8) -> float:
    """Offset logarithmic integral: integral of dt/log t over [2, x]."""
    if x < 2:
        raise DomainError("li(x) is defined here for x >= 2")
    if x == 2:
        return 0.0
    # t = e^u makes the integrand e^u/u smooth on [log 2, log x]
    a, b = math.log(2.0), math.log(x)
    scale = max(x / b, 1.0)
    return _simpson(lambda u: math.exp(u) / u, a, b, rtol * scale * 0.1)


# --------------------------------------------------------------------------
# comparability of P(x) and P(eta x)


def _cauchy_bound(coeffs: Sequence[Fraction]) -> Fraction:
    lead = coeffs[-1]
    return 1 + max((abs(c / lead) for c in coeffs[:-1]), default=Fraction(0))


def comparability_threshold(P: IntPoly, eta: float, grid: int = 1000) -> int:
    """Least M0 >= 1 such that eta^d P(x) <= 3 P(eta x) <= 9 eta^d P(x) on the grid
    x = M0/eta * 1.01^j, j = 0..grid.

    The scan is capped by a Cauchy root bound beyond which both inequalities hold
    for every real x, so it always terminates.
    """
    d = P.degree
    if d < 1 or P.leading <= 0:
        raise DomainError("P must be non-constant with positive leading coefficient")
    e = to_fraction(eta)
    if not 0 < e < 1:
        raise DomainError("eta must lie in (0, 1)")
    ed = e**d
    low = [3 * c * e**i - ed * c for i, c in enumerate(P.coeffs)]  # 3P(ex) - e^d P(x)
    high = [9 * ed * c - 3 * c * e**i for i, c in enumerate(P.coeffs)]  # 9e^dP(x) - 3P(ex)
    R = max(_cauchy_bound(low), _cauchy_bound(high))
    cap = max(1, math.ceil(R * e))

    coeffs = np.array([float(c) for c in P.coeffs], dtype=np.longdouble)
    powers = np.power(np.longdouble(1.01), np.arange(grid + 1, dtype=np.longdouble))
    ef, edf = np.longdouble(float(e)), np.longdouble(float(ed))

    def peval(x: np.ndarray) -> np.ndarray:
        r = np.zeros_like(x)
        for c in coeffs[::-1]:
            r = r * x + c
        return r

    def ok(M0: int) -> bool:
        xs = (np.longdouble(M0) / ef) * powers
        px, pex = peval(xs), 3 * peval(ef * xs)
        tol = 1e-15 * np.abs(px) * 9
        return bool(np.all(edf * px <= pex + tol) and np.all(pex <= 9 * edf * px + tol))

    for M0 in range(1, cap):
        if ok(M0):
            return M0
    return cap
