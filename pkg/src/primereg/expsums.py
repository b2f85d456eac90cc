"""Complete exponential sums, prime Weyl sums, arcs and the major-arc main term."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ._backend import kernels
from .errors import DomainError, SpecError
from .numtheory import cf_approx, convergents, omega, phi, sieve_primes, to_fraction
from .parallel import map_chunks, tree_sum
from .poly import IntPoly, content_nonconstant, taylor_shift

TWO_PI = 2.0 * math.pi
_KERNEL_MOD_LIMIT = 1 << 62

# --------------------------------------------------------------------------
# exact phases


def phase_residues(h: IntPoly, frac: Fraction, xs: np.ndarray, offset: int = 0):
    """Exact residues r with frac*(h(x) - offset) = r/den (mod 1).

    Returns ``(r, den)``; ``r`` is an int64 array when den < 2^62 (computed by the
    128-bit kernel), otherwise a list of Python ints.
    """
    num, den = frac.numerator, frac.denominator
    xs = np.asarray(xs, dtype=np.int64)
    if den == 1:
        return np.zeros(len(xs), dtype=np.int64), 1
    cs = list(h.coeffs) or [0]
    cs[0] -= offset
    if den < _KERNEL_MOD_LIMIT:
        red = np.array([c % den for c in cs], dtype=np.int64)
        res = kernels.poly_residues(xs, red, den)
        return kernels.scale_residues(res, num % den, den), den
    hh = IntPoly(cs)
    return [(num * hh(int(x))) % den for x in xs.tolist()], den


def residues_to_unit(res, den: int) -> np.ndarray:
    if den == 1:
        return np.ones(len(res), dtype=np.complex128)
    if isinstance(res, np.ndarray) and den < (1 << 53):
        frac = res.astype(np.float64) / den
    else:
        frac = np.array([r / den for r in (res.tolist() if isinstance(res, np.ndarray) else res)], dtype=np.float64)
    return np.exp(TWO_PI * 1j * frac)


def dist_from_residues(res, den: int) -> np.ndarray:
    """||r/den|| as floats, from exact residues."""
    if den == 1:
        return np.zeros(len(res), dtype=np.float64)
    if isinstance(res, np.ndarray):
        r = np.minimum(res, den - res)
        return r.astype(np.float64) / den if den < (1 << 53) else np.array([int(x) / den for x in r.tolist()])
    return np.array([min(r, den - r) / den for r in res], dtype=np.float64)


# --------------------------------------------------------------------------
# arcs


@dataclass(frozen=True)
class ArcParams:
    """Arc threshold T = (log X)^(2 C_d), C_d = 2^(8d) sigma_d.

    ``exponent`` replaces 2 C_d when given; at desk scale the default exponent
    makes every phase major, so experiments that need minor arcs set it.
    """

    d: int
    X: float
    sigma_d: int | None = None
    exponent: float | None = None

    def __post_init__(self):
        if self.sigma_d is None:
            object.__setattr__(self, "sigma_d", 2 * self.d + 10)
        if self.X < 16:
            raise DomainError("arc classification needs X >= 16")

    @property
    def C_d(self) -> int:
        return 2 ** (8 * self.d) * self.sigma_d

    @property
    def log_T(self) -> float:
        e = self.exponent if self.exponent is not None else 2 * self.C_d
        return e * math.log(math.log(self.X))

    @property
    def T(self) -> float:
        return math.exp(self.log_T) if self.log_T < 700 else math.inf

    @property
    def degenerate(self) -> bool:
        """True when T >= X^(1/4): the dichotomy carries little information."""
        return self.log_T >= 0.25 * math.log(self.X)


@dataclass(frozen=True)
class ArcClassification:
    kind: str  # "major" | "minor"
    q: int | None = None
    a: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "q": self.q, "a": self.a}


def classify_arc(alpha, params: ArcParams) -> ArcClassification:
    """Major with the least admissible q (always a convergent denominator), else minor."""
    al = to_fraction(alpha)
    al -= math.floor(al)
    logT = params.log_T
    logXd = params.d * math.log(params.X)
    for c in convergents(al):
        if math.log(c.q) > logT:
            break
        a = round(c.q * al)
        gap = abs(c.q * al - a)
        if gap == 0 or logXd + math.log(gap) <= logT:
            return ArcClassification("major", c.q, a)
    return ArcClassification("minor")


# --------------------------------------------------------------------------
# complete sums


@dataclass(frozen=True)
class CompleteSumSpec:
    f: IntPoly
    Q: int
    q: int
    a: int
    m: int = 1
    b: int = 0

    def validate(self) -> None:
        if self.q < 1 or self.Q < 1 or self.m < 1:
            raise SpecError("q, Q, m must be positive")
        if math.gcd(self.a, self.q) != 1:
            raise SpecError("a must be coprime to q")
        if math.gcd(self.b, self.m) != 1:
            raise SpecError("b must be coprime to m")
        g = taylor_shift(self.f, self.b, self.m) - self.f(self.b)
        if any(c % self.Q for c in g.coeffs):
            raise SpecError("(f(b+mx) - f(b))/Q is not an integer polynomial")


def _sum_unit(res, den: int) -> complex:
    return complex(residues_to_unit(res, den).sum())


def complete_sum(spec: CompleteSumSpec) -> complex:
    """S(q,a;m) = sum over t mod mq, (t,q)=1, t = b mod m of e_{Qq}(a f(t))."""
    spec.validate()
    q, m = spec.q, spec.m
    ts = spec.b % m + m * np.arange(q, dtype=np.int64)
    ts = ts[np.gcd(ts, q) == 1]
    res, den = phase_residues(spec.f, Fraction(spec.a, spec.Q * q), ts)
    return _sum_unit(res, den)


def restricted_complete_sum(g: IntPoly, W: int, b: int, q: int, a: int) -> complex:
    """Sum over 0 <= l < q with gcd(W l + b, q) = 1 of e_q(a g(l))."""
    if math.gcd(a, q) != 1:
        raise DomainError("a must be coprime to q")
    ls = np.arange(q, dtype=np.int64)
    keep = np.gcd((W % q) * ls + (b % q), q) == 1 if q > 1 else np.ones(1, dtype=bool)
    res, den = phase_residues(g, Fraction(a, q), ls[keep])
    return _sum_unit(res, den)


def rice_bound_base(g: IntPoly, W: int, q: int) -> float:
    """(gcd(cont g, q1) gcd(a_k, q2))^(1/k) q^(1-1/k), q2 the largest divisor of q coprime to W."""
    k = g.degree
    q2 = q
    while True:
        t = math.gcd(q2, W)
        if t == 1:
            break
        q2 //= t
    q1 = q // q2
    s = math.gcd(content_nonconstant(g), q1) * math.gcd(g.leading, q2)
    return s ** (1.0 / k) * q ** (1.0 - 1.0 / k)


@dataclass
class RiceReport:
    C: float
    samples: int
    worst: dict = field(default_factory=dict)


def verify_rice_bound(h: IntPoly, qmax: int, trials: int = 2, seed: int = 0, Wmax: int = 30) -> RiceReport:
    """Smallest C with |sum| <= C^omega(q) * base over every sampled (q, a, W, b)."""
    if h.degree < 2:
        raise DomainError("needs degree >= 2")
    rng = random.Random(seed)
    C, worst, n = 1.0, {}, 0
    for q in range(1, qmax + 1):
        for _ in range(trials):
            a = rng.randrange(1, q + 1) if q > 1 else 1
            while math.gcd(a, q) != 1:
                a = rng.randrange(1, q + 1)
            W, b = rng.randrange(1, Wmax + 1), rng.randrange(0, Wmax + 1)
            val = abs(restricted_complete_sum(h, W, b, q, a))
            n += 1
            w = omega(q)
            if w == 0:
                continue  # q = 1: |sum| <= 1 = bound for every C
            need = (val / rice_bound_base(h, W, q)) ** (1.0 / w)
            if need > C:
                C, worst = need, {"q": q, "a": a, "W": W, "b": b, "abs_sum": val}
    return RiceReport(C, n, worst)


def gauss_unit_oracle(p: int, a: int) -> complex:
    """Closed form of sum_{t=1}^{p-1} e_p(a t^2) for an odd prime p: (a|p) eps_p sqrt(p) - 1."""
    leg = pow(a % p, (p - 1) // 2, p)
    leg = -1 if leg == p - 1 else leg
    eps = 1 if p % 4 == 1 else 1j
    return leg * eps * math.sqrt(p) - 1


# --------------------------------------------------------------------------
# prime Weyl sums

WEIGHTS = ("unit", "log", "hprime", "hprime_log")


@dataclass(frozen=True)
class WeylSpec:
    """sum over lower < p <= P, p = b (mod m) of e(theta (h(p) - offset)/lam) G(p) [log p]."""

    h: IntPoly
    theta: object
    P: int
    lam: int = 1
    m: int = 1
    b: int = 0
    weight: str = "unit"
    offset: int = 0
    lower: int = 0

    def __post_init__(self):
        if self.weight not in WEIGHTS:
            raise DomainError(f"weight must be one of {WEIGHTS}")
        if math.gcd(self.b, self.m) != 1:
            raise DomainError("b must be coprime to m")

    @property
    def phase(self) -> Fraction:
        return to_fraction(self.theta) / self.lam


def weight_values(h: IntPoly, weight: str, ps: np.ndarray) -> np.ndarray:
    x = ps.astype(np.float64)
    g = np.ones_like(x)
    if weight.startswith("hprime"):
        g = np.zeros_like(x)
        for c in reversed(h.derivative().coeffs):
            g = g * x + c
    if weight.endswith("log"):
        g = g * np.log(x)
    return g


def weyl_primes(spec: WeylSpec) -> np.ndarray:
    if spec.P < 2:
        return np.empty(0, dtype=np.int64)
    return sieve_primes(spec.P).in_progression(spec.m, spec.b, lo=spec.lower)


def prime_weyl_sum(spec: WeylSpec, threads: int = 1, chunk: int = 1 << 16) -> complex:
    ps = weyl_primes(spec)
    if len(ps) == 0:
        return 0j
    frac = spec.phase

    def part(lo: int, hi: int) -> complex:
        sub = ps[lo:hi]
        res, den = phase_residues(spec.h, frac, sub, spec.offset)
        return complex(np.dot(residues_to_unit(res, den), weight_values(spec.h, spec.weight, sub)))

    return complex(tree_sum(map_chunks(part, len(ps), chunk, threads)))


# --------------------------------------------------------------------------
# oscillatory integrals and the major-arc main term


def integrand_weight(h: IntPoly, weight: str, for_prediction: bool = True) -> Callable[[np.ndarray], np.ndarray]:
    """G(t) for the integral; a sum without log p weight pairs with G(t)/log t."""
    dh = h.derivative()

    def G(t: np.ndarray) -> np.ndarray:
        g = np.ones_like(t)
        if weight.startswith("hprime"):
            g = np.zeros_like(t)
            for c in reversed(dh.coeffs):
                g = g * t + c
        if for_prediction and not weight.endswith("log"):
            g = g / np.log(t)
        return g

    return G


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _panel_integral(phase_fn, G, a: float, b: float, n: int) -> complex:
    width = (b - a) / n
    total = []
    step = 1 << 16
    for s in range(0, n, step):
        k = np.arange(s, min(n, s + step), dtype=np.float64)
        left = a + k * width
        t = (left[:, None] + (0.5 * width) * (_GL_NODES[None, :] + 1.0)).ravel()
        vals = np.exp(TWO_PI * 1j * phase_fn(t)) * G(t)
        total.append(complex((vals.reshape(-1, 8) * _GL_WEIGHTS[None, :]).sum()) * 0.5 * width)
    return complex(tree_sum(total))


def oscillatory_integral(
    f: IntPoly,
    G: Callable[[np.ndarray], np.ndarray] | None,
    Q: int,
    beta,
    P: float,
    lower: float = 2.0,
    rtol: float = 1e-6,
    max_panels: int = 1 << 23,
) -> complex:
    """Integral over [lower, P] of e(beta f(t)/Q) G(t) dt by panel Gauss-Legendre.

    Panels are never wider than 1/(8 max|phase'|) and are halved until two
    successive estimates agree to ``rtol``.
    """
    if P <= lower:
        return 0j
    G = G or (lambda t: np.ones_like(t))
    bq = float(beta) / Q
    df = f.derivative()
    slope = abs(bq) * sum(abs(c) * P**i for i, c in enumerate(df.coeffs))
    n = max(8, math.ceil((P - lower) * 8 * slope))
    coeffs = f.coeffs

    def phase(t: np.ndarray) -> np.ndarray:
        r = np.zeros_like(t)
        for c in reversed(coeffs):
            r = r * t + c
        return bq * r

    prev = _panel_integral(phase, G, lower, P, n)
    while True:
        n *= 2
        cur = _panel_integral(phase, G, lower, P, n)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300) or n >= max_panels:
            return cur
        prev = cur


def major_arc_prediction(spec: WeylSpec, q: int, a: int) -> complex:
    """I(beta) S(q,a;m)/phi(mq) with beta = theta - a/q and f = h - offset, Q = lam."""
    f = spec.h - spec.offset
    cs = CompleteSumSpec(f, spec.lam, q, a, spec.m, spec.b)
    S = complete_sum(cs)
    beta = to_fraction(spec.theta) - Fraction(a, q)
    I = oscillatory_integral(f, integrand_weight(spec.h, spec.weight), spec.lam, beta, spec.P)
    return I * S / phi(spec.m * q)


def prediction_scale(spec: WeylSpec, q: int) -> float:
    """Trivial size of the main term: |I(0)| times (#summed residues)/phi(mq).

    Used to normalise the error when S(q,a;m) vanishes and the prediction is 0.
    """
    f = spec.h - spec.offset
    I0 = abs(oscillatory_integral(f, integrand_weight(spec.h, spec.weight), spec.lam, 0, spec.P))
    ts = spec.b % spec.m + spec.m * np.arange(q, dtype=np.int64)
    count = int((np.gcd(ts, q) == 1).sum())
    return I0 * count / phi(spec.m * q)


@dataclass
class MajorArcCheck:
    q: int
    a: int
    direct: complex
    prediction: complex
    rel_error: float
    normalised_by: str  # "prediction" or "scale"


def major_arc_check(spec: WeylSpec, q: int, a: int, threads: int = 1) -> MajorArcCheck:
    """Compare the direct sum at ``spec.theta`` with the main term for (q, a)."""
    base = spec
    direct = prime_weyl_sum(base, threads=threads)
    pred = major_arc_prediction(base, q, a)
    scale = prediction_scale(base, q)
    if abs(pred) > 1e-9 * scale:
        return MajorArcCheck(q, a, direct, pred, abs(direct - pred) / abs(pred), "prediction")
    return MajorArcCheck(q, a, direct, pred, abs(direct - pred) / scale, "scale")


def minor_arc_ratios(h: IntPoly, alphas: Sequence, P: int, weight: str = "log") -> list[float]:
    """|sum at alpha| / |sum at 0| for each alpha."""
    zero = abs(prime_weyl_sum(WeylSpec(h, 0, P, weight=weight)))
    return [abs(prime_weyl_sum(WeylSpec(h, al, P, weight=weight))) / zero for al in alphas]


def best_rational(theta, Qmax: int):
    return cf_approx(theta, Qmax)
