"""W-trick parameters, transference weights, Fourier transforms and moments."""

from __future__ import annotations

import hashlib
import io
import json
import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels
from .distributions import ValueDist, count_equal, sum_of
from .errors import ConstructionError, DomainError, GuardError, IntegrityError
from .expsums import CompleteSumSpec, complete_sum
from .intersective import aux_poly
from .numtheory import factorint, phi, sieve_primes, to_fraction
from .poly import IntPoly

TWO_PI = 2.0 * math.pi
MAX_W = 1 << 64

# --------------------------------------------------------------------------
# exact integer evaluation


def poly_values(h: IntPoly, xs: np.ndarray) -> np.ndarray:
    """Exact h(x); int64 when the values provably fit, object array otherwise."""
    xs = np.asarray(xs, dtype=np.int64)
    if len(xs) == 0:
        return np.empty(0, dtype=np.int64)
    xm = int(np.abs(xs).max())
    bound = sum(abs(c) * xm**i for i, c in enumerate(h.coeffs))
    if bound < (1 << 62):
        r = np.zeros(len(xs), dtype=np.int64)
        for c in reversed(h.coeffs):
            r = r * xs + c
        return r
    return np.array([h(int(x)) for x in xs.tolist()], dtype=object)


def real_increasing_from(h: IntPoly) -> int:
    """An integer beyond which h' > 0 (Cauchy bound of h'); requires a positive leading coefficient."""
    dh = h.derivative()
    if dh.degree < 1:
        return 0
    lead = abs(dh.leading)
    return math.ceil(1 + max(Fraction(abs(c), lead) for c in dh.coeffs[:-1]))


# --------------------------------------------------------------------------
# W-trick


@dataclass(frozen=True)
class WTrickParams:
    h: IntPoly
    w: int
    gamma: int
    C: int
    M: int
    W: int
    D: int
    lam: int
    r_D: int
    b0: int
    b: int
    g: int  # (h'(b), W)
    kappa: int
    X: int
    Z: int
    N: int

    @property
    def modulus(self) -> int:
        return self.W * self.kappa

    @property
    def V_squared(self) -> int:
        return self.W

    def identities(self) -> dict[str, bool]:
        h = self.h
        return {
            "W*kappa*g == lambda": self.W * self.kappa * self.g == self.lam,
            "D == W^2": self.D == self.W**2,
            "lambda*N == h(X)": self.lam * self.N == h(self.X),
            "N == h_D(Z)": aux_poly(h, self.D).h_D(self.Z) == self.N,
            "gcd(b, W) == 1": math.gcd(self.b, self.W) == 1,
            "g^2 | W": self.W % (self.g * self.g) == 0,
            "kappa is w-smooth": all(p <= self.w for p, _ in factorint(self.kappa)) if self.kappa > 1 else True,
            "D | X - r_D": (self.X - self.r_D) % self.D == 0,
        }

    def to_dict(self) -> dict:
        return {
            "h": list(self.h.coeffs), "w": self.w, "gamma": self.gamma, "C": self.C, "M": self.M,
            "W": self.W, "D": self.D, "lambda": self.lam, "r_D": self.r_D, "b0": self.b0, "b": self.b,
            "g": self.g, "kappa": self.kappa, "X": self.X, "Z": self.Z, "N": self.N,
        }

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


def smooth_modulus(w: int, gamma: int) -> int:
    primes = [p for p in range(2, w + 1) if all(p % q for q in range(2, int(p**0.5) + 1))]
    return math.prod(primes) ** gamma


def align_X(X: int, r_D: int, D: int) -> int:
    """Largest X' <= X with D | X' - r_D."""
    return X - ((X - r_D) % D)


def build_wtrick(h: IntPoly, w: int, gamma: int, X: int, C: int = 1, policy: str = "canonical", align: bool = False) -> WTrickParams:
    """Density-free W-trick: the least admissible b0 in [1, W], then b = b0 lifted past h's last critical point.

    Admissibility of b0 is gcd(b0, W) = 1 and g^2 | W for g = gcd(h'(b0), W),
    which is how "g divides V = sqrt(W)" is read when W is not a perfect square.
    """
    if h.leading <= 0:
        raise ConstructionError("h must have a positive leading coefficient")
    W = smooth_modulus(w, gamma)
    if W > MAX_W:
        raise GuardError(f"W = (prod p<=w)^gamma has {W.bit_length()} bits; refusing numeric construction above 2^64")
    D = W * W
    aux = aux_poly(h, D, policy)
    lam, r_D = aux.lam, aux.r_D
    dh = h.derivative()
    b0, g = None, None
    for cand in range(1, W + 1):
        if math.gcd(cand, W) != 1:
            continue
        gg = math.gcd(dh(cand), W)
        if W % (gg * gg) == 0:
            b0, g = cand, gg
            break
    if b0 is None:
        raise ConstructionError(f"no b in [1, {W}] with gcd(b, W) = 1 and (h'(b), W)^2 | W")
    if lam % (W * g):
        raise IntegrityError("lambda(D) is not divisible by W*(h'(b), W)")
    kappa = lam // (W * g)
    start = real_increasing_from(h)
    b = b0
    while b < start:
        b += W
    if b > W * kappa:
        raise ConstructionError("no residue b <= W*kappa lies past the last critical point of h")
    if align:
        X = align_X(X, r_D, D)
    if (X - r_D) % D:
        raise DomainError(f"X must satisfy X = r_D (mod D); nearest aligned value is {align_X(X, r_D, D)}")
    if X <= b:
        raise DomainError("X must exceed b")
    Z = (X - r_D) // D
    hX = h(X)
    if hX % lam:
        raise IntegrityError("h(X) is not divisible by lambda(D)")
    M = C * h.degree**2 * 10 ** (4 * w)
    return WTrickParams(h, w, gamma, C, M, W, D, lam, r_D, b0, b, g, kappa, X, Z, hX // lam)


# --------------------------------------------------------------------------
# weight tables

_MAGIC = b"PRWT\x01"


@dataclass(frozen=True)
class WeightTable:
    """Sparse nonnegative weight n -> value on [1, N]; keys sorted and unique."""

    N: int
    keys: np.ndarray
    values: np.ndarray
    params_hash: str = ""
    dropped_mass: float = 0.0

    @classmethod
    def from_pairs(cls, N: int, keys, values, params_hash: str = "") -> WeightTable:
        if N >= (1 << 62):
            raise GuardError("support bound N does not fit in 62 bits")
        keys = np.asarray(keys)
        values = np.asarray(values, dtype=np.float64)
        inside = np.array([1 <= int(k) <= N for k in keys], dtype=bool) if keys.dtype == object else (keys >= 1) & (keys <= N)
        dropped = float(values[~inside].sum())
        k = keys[inside].astype(np.int64)
        v = values[inside]
        if len(k):
            order = np.argsort(k, kind="stable")
            k, v = k[order], v[order]
            uniq, start = np.unique(k, return_index=True)
            v = np.add.reduceat(v, start) if len(v) else v
            k = uniq
        return cls(int(N), k, v, params_hash, dropped)

    @classmethod
    def indicator(cls, N: int, support: Iterable[int] | None = None) -> WeightTable:
        keys = np.arange(1, N + 1, dtype=np.int64) if support is None else np.array(sorted(set(support)), dtype=np.int64)
        return cls.from_pairs(N, keys, np.ones(len(keys)))

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def mass(self) -> float:
        return float(self.values.sum())

    def get(self, n: int) -> float:
        i = np.searchsorted(self.keys, n)
        return float(self.values[i]) if i < len(self.keys) and self.keys[i] == n else 0.0

    def restrict(self, A: Iterable[int]) -> WeightTable:
        a = np.array(sorted(set(int(x) for x in A)), dtype=np.int64)
        mask = np.isin(self.keys, a)
        return WeightTable(self.N, self.keys[mask], self.values[mask], self.params_hash)

    def to_dist(self) -> ValueDist:
        return ValueDist(self.keys, self.values)

    def dense(self) -> np.ndarray:
        out = np.zeros(self.N + 1, dtype=np.float64)
        out[self.keys] = self.values
        return out

    # serialisation ---------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"N": self.N, "params_hash": self.params_hash, "pairs": [[int(k), float(v)] for k, v in zip(self.keys, self.values)]},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> WeightTable:
        d = json.loads(text)
        pairs = d["pairs"]
        keys = np.array([p[0] for p in pairs], dtype=np.int64)
        vals = np.array([p[1] for p in pairs], dtype=np.float64)
        return cls(int(d["N"]), keys, vals, d.get("params_hash", ""))

    def to_bytes(self) -> bytes:
        buf = io.BytesIO()
        ph = self.params_hash.encode()
        buf.write(_MAGIC)
        buf.write(struct.pack("<qqH", self.N, len(self.keys), len(ph)))
        buf.write(ph)
        buf.write(self.keys.astype("<i8").tobytes())
        buf.write(self.values.astype("<f8").tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> WeightTable:
        if not data.startswith(_MAGIC):
            raise DomainError("not a weight table")
        off = len(_MAGIC)
        N, n, lh = struct.unpack_from("<qqH", data, off)
        off += struct.calcsize("<qqH")
        ph = data[off : off + lh].decode()
        off += lh
        keys = np.frombuffer(data, dtype="<i8", count=n, offset=off).astype(np.int64)
        off += 8 * n
        vals = np.frombuffer(data, dtype="<f8", count=n, offset=off).astype(np.float64)
        return cls(N, keys, vals, ph)

    def same_as(self, other: WeightTable) -> bool:
        return (
            self.N == other.N
            and self.params_hash == other.params_hash
            and np.array_equal(self.keys, other.keys)
            and self.values.tobytes() == other.values.tobytes()
        )


def _hprime_float(h: IntPoly, xs: np.ndarray) -> np.ndarray:
    x = xs.astype(np.float64)
    r = np.zeros_like(x)
    for c in reversed(h.derivative().coeffs):
        r = r * x + c
    return r


def _keys_from(vals: np.ndarray, shift: int, lam: int) -> np.ndarray:
    if vals.dtype == object:
        out = [(int(v) - shift) for v in vals]
        if any(v % lam for v in out):
            raise IntegrityError("value not divisible by lambda(D)")
        return np.array([v // lam for v in out], dtype=object)
    diff = vals - shift
    if np.any(diff % lam):
        raise IntegrityError("value not divisible by lambda(D)")
    return diff // lam


def build_nu(params: WTrickParams, A: Iterable[int] | None = None) -> WeightTable:
    """nu(n) = phi(W)/(W g) * sum of h'(p) log p over b < p <= X, p = b (mod W kappa), (h(p)-h(b))/lambda = n."""
    h = params.h
    ps = sieve_primes(max(params.X, 2)).in_progression(params.modulus, params.b, lo=params.b, hi=params.X)
    if A is not None:
        ps = ps[np.isin(ps, np.fromiter((int(x) for x in A), dtype=np.int64))]
    keys = _keys_from(poly_values(h, ps), h(params.b), params.lam)
    vals = phi(params.W) / (params.W * params.g) * _hprime_float(h, ps) * np.log(ps.astype(np.float64))
    return WeightTable.from_pairs(params.N, keys, vals, params.digest())


def build_mu(params: WTrickParams) -> WeightTable:
    """mu(n) = (1/g) * sum of h'(x) over all integers b < x <= X in the progression."""
    h = params.h
    m = params.modulus
    xs = params.b + m * np.arange(1, (params.X - params.b) // m + 1, dtype=np.int64)
    keys = _keys_from(poly_values(h, xs), h(params.b), params.lam)
    vals = _hprime_float(h, xs) / params.g
    return WeightTable.from_pairs(params.N, keys, vals, params.digest())


@dataclass(frozen=True)
class DParams:
    h: IntPoly
    D: int
    lam: int
    r_D: int
    h_D: IntPoly
    X: int
    Z: int
    N: int

    def digest(self) -> str:
        s = json.dumps([list(self.h.coeffs), self.D, self.X], sort_keys=True)
        return hashlib.sha256(s.encode()).hexdigest()[:16]


def d_params(h: IntPoly, D: int, X: int, policy: str = "canonical") -> DParams:
    aux = aux_poly(h, D, policy)
    Z = (X - aux.r_D) // D
    return DParams(h, D, aux.lam, aux.r_D, aux.h_D, X, Z, aux.h_D(Z))


def build_nu_D(h: IntPoly, D: int, X: int, policy: str = "canonical") -> WeightTable:
    """nu_D(n) = phi(D)/lambda * sum of h'(p) log p over p <= X, p = r_D (mod D), h(p) = n lambda."""
    dp = d_params(h, D, X, policy)
    ps = sieve_primes(max(X, 2)).in_progression(D, dp.r_D, hi=X)
    keys = _keys_from(poly_values(h, ps), 0, dp.lam)
    vals = phi(D) / dp.lam * _hprime_float(h, ps) * np.log(ps.astype(np.float64))
    return WeightTable.from_pairs(dp.N, keys, vals, dp.digest())


def build_mu_D(h: IntPoly, D: int, X: int, policy: str = "canonical") -> WeightTable:
    """mu_D(n) = (N D / X) * #{1 <= z <= Z : h_D(z) = n}."""
    dp = d_params(h, D, X, policy)
    zs = np.arange(1, dp.Z + 1, dtype=np.int64)
    keys = poly_values(dp.h_D, zs)
    vals = np.full(len(zs), dp.N * D / X)
    return WeightTable.from_pairs(dp.N, keys, vals, dp.digest())


def nu_mass_on(nu: WeightTable, A: Iterable[int]) -> float:
    return nu.restrict(A).mass


def image_of(params: WTrickParams, primes: Iterable[int]) -> list[int]:
    """{(h(p) - h(b))/lambda : p in A, p = b (mod W kappa)}."""
    h, hb, m = params.h, params.h(params.b), params.modulus
    return sorted({(h(p) - hb) // params.lam for p in primes if p % m == params.b % m and params.b < p <= params.X})


# --------------------------------------------------------------------------
# vanishing identity


def wtrick_S(params: WTrickParams, q: int, a: int) -> complex:
    """The sum over t mod W kappa q, (t,q)=1, t = b (mod W kappa) of e_q(a (h(t)-h(b))/lambda)."""
    f = params.h - params.h(params.b)
    return complete_sum(CompleteSumSpec(f, params.lam, q, a, params.modulus, params.b))


# --------------------------------------------------------------------------
# Fourier transforms


def fourier_eval(table: WeightTable, alpha) -> complex:
    """Exact-phase evaluation of sum f(n) e(alpha n)."""
    if len(table) == 0:
        return 0j
    fr = to_fraction(alpha)
    num, den = fr.numerator, fr.denominator
    if den == 1:
        return complex(table.values.sum())
    if den < (1 << 62):
        res = kernels.scale_residues(table.keys % den, num % den, den)
        ph = res.astype(np.float64) / den if den < (1 << 53) else np.array([int(r) / den for r in res.tolist()])
    else:
        ph = np.array([(num * int(k)) % den / den for k in table.keys.tolist()])
    return complex(np.dot(np.exp(TWO_PI * 1j * ph), table.values))


def fourier_grid(table: WeightTable, M: int) -> np.ndarray:
    """Values at alpha = j/M, j = 0..M-1, via residue bucketing and one FFT."""
    buckets = np.bincount(table.keys % M, weights=table.values, minlength=M)
    return M * np.fft.ifft(buckets)


def interval_transform(N: int, alpha) -> complex:
    """Closed form of sum_{n=1}^N e(alpha n)."""
    fr = to_fraction(alpha)
    if fr.denominator == 1:
        return complex(N)
    a = float(fr - math.floor(fr))
    z = np.exp(TWO_PI * 1j * a)
    zN = np.exp(TWO_PI * 1j * float((fr * N) - math.floor(fr * N)))
    return complex(z * (zN - 1) / (z - 1))


@dataclass
class DecayReport:
    max_value: float
    argmax_alpha: str
    alpha0_row: float
    rows: list[tuple[str, float]] = field(default_factory=list)


def decay_report(nu: WeightTable, N: int, samples: int = 256, qmax: int = 30) -> DecayReport:
    """max over sampled alpha of |nu^(alpha) - 1_[N]^(alpha)| / N (uniform grid plus a/q, q <= qmax)."""
    alphas: dict[Fraction, None] = {}
    for j in range(samples):
        alphas[Fraction(j, samples)] = None
    for q in range(1, qmax + 1):
        for a in range(q):
            if math.gcd(a, q) == 1:
                alphas[Fraction(a, q)] = None
    rows = []
    for al in sorted(alphas):
        val = abs(fourier_eval(nu, al) - interval_transform(N, al)) / N
        rows.append((f"{al.numerator}/{al.denominator}", val))
    best = max(rows, key=lambda r: r[1])
    return DecayReport(best[1], best[0], rows[0][1], rows)


# --------------------------------------------------------------------------
# restriction moments


@dataclass
class MomentReport:
    E: float
    value: float
    normalised: float
    method: str

    def to_dict(self) -> dict:
        return {"E": self.E, "value": self.value, "normalised": self.normalised, "method": self.method}


def _as_table(f) -> WeightTable:
    if isinstance(f, WeightTable):
        return f
    keys, vals = zip(*sorted(dict(f).items())) if f else ((), ())
    return WeightTable.from_pairs(max(keys) if keys else 1, keys, vals)


def restriction_moment(f, E: float, method: str = "exact", N: int | None = None, max_grid: int = 1 << 24) -> MomentReport:
    """Integral over the circle of |f^|^E.

    ``exact`` (even E): weighted count of n_1+..+n_{E/2} = n_{E/2+1}+..+n_E by
    iterated convolution. ``quadrature``: Riemann sum on a grid of M >= 4EN points.
    """
    t = _as_table(f)
    N = N or t.N
    if method == "exact":
        if E != int(E) or int(E) % 2:
            raise DomainError("the exact method needs an even integer E")
        k = int(E) // 2
        if t.values.dtype.kind != "f" or np.all(t.values == np.round(t.values)):
            base = ValueDist(t.keys, np.round(t.values).astype(np.int64)) if np.all(t.values == np.round(t.values)) else t.to_dist()
        else:
            base = t.to_dist()
        half = sum_of([base] * k)
        value = count_equal(half, half.scaled(-1), 0)
        value = float(value) if not isinstance(value, int) else value
    elif method == "quadrature":
        M = 4 * int(math.ceil(E)) * int(N)
        if M > max_grid:
            raise GuardError(f"quadrature grid of {M} points exceeds the limit {max_grid}")
        vals = np.abs(fourier_grid(t, M)) ** E
        value = float(vals.mean())
    else:
        raise DomainError(f"unknown method {method!r}")
    return MomentReport(E, value, float(value) / float(N) ** (E - 1), method)


def quadruple_count(N: int) -> int:
    """#{(a,b,c,d) in [N]^4 : a+b = c+d}, closed form (2N^3 + N)/3."""
    return (2 * N**3 + N) // 3


# --------------------------------------------------------------------------
# counting operator


def phi_count(fs: Sequence[WeightTable], gs: Sequence[WeightTable], L1: Sequence[int], L2: Sequence[int]) -> float:
    """Sum over L1(n) = L2(m) of prod f_i(n_i) prod g_j(m_j), by meet-in-the-middle."""
    if len(fs) != len(L1) or len(gs) != len(L2):
        raise DomainError("each table needs one linear-form coefficient")
    if not fs:
        raise DomainError("at least one f is required")
    if any(c == 0 for c in list(L1) + list(L2)):
        raise DomainError("linear forms must have nonzero coefficients")
    left = sum_of([_dist(f).scaled(c) for f, c in zip(fs, L1)])
    right = sum_of([_dist(g).scaled(c) for g, c in zip(gs, L2)])
    val = count_equal(left, right.scaled(-1), 0)
    return float(val)


def _dist(t: WeightTable) -> ValueDist:
    vals = t.values
    if np.all(vals == np.round(vals)) and (len(vals) == 0 or np.abs(vals).max() < 2**31):
        return ValueDist(t.keys, np.round(vals).astype(np.int64))
    return t.to_dist()


# --------------------------------------------------------------------------
# inverse of z -> h_D(z) on [eta Z, Z]


def qz_inverse(h_D: IntPoly, Z: int, eta: float, t: int, grid: int = 64) -> int:
    """The z in [eta Z, Z] with h_D(z) = t, or 0. h_D must increase on that interval."""
    lo = math.ceil(to_fraction(eta) * Z)
    hi = Z
    if lo > hi:
        return 0
    dh = h_D.derivative()
    pts = {lo, hi} | {lo + (hi - lo) * i // grid for i in range(grid + 1)}
    if any(dh(z) <= 0 for z in pts) and hi > lo:
        raise DomainError("h_D is not increasing on [eta Z, Z]")
    if not h_D(lo) <= t <= h_D(hi):
        return 0
    while lo < hi:
        mid = (lo + hi) // 2
        if h_D(mid) < t:
            lo = mid + 1
        else:
            hi = mid
    return lo if h_D(lo) == t else 0
