"""Pure numpy/Python twins of the compiled kernels in ``_ckernels.pyx``."""

from __future__ import annotations

import numpy as np
from sympy.ntheory import sqrt_mod

_INT31 = 1 << 31


def sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, int(limit**0.5) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def poly_residues(xs: np.ndarray, coeffs: np.ndarray, M: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    cs = [int(c) for c in coeffs]
    if M < _INT31:
        x = np.mod(xs, M)
        r = np.zeros_like(x)
        for c in reversed(cs):
            r = (r * x + c) % M
        return r
    out = np.empty(len(xs), dtype=np.int64)
    for i, xv in enumerate(xs.tolist()):
        xv %= M
        r = 0
        for c in reversed(cs):
            r = (r * xv + c) % M
        out[i] = r
    return out


def scale_residues(res: np.ndarray, num: int, M: int) -> np.ndarray:
    res = np.asarray(res, dtype=np.int64)
    if M < _INT31:
        return (res * num) % M
    return np.fromiter(((r * num) % M for r in res.tolist()), dtype=np.int64, count=len(res))


def scatter_sumset(v1, w1, v2, w2, out, offset: int) -> None:
    v2 = np.asarray(v2, dtype=np.int64) - offset
    w2 = np.asarray(w2)
    # float bincount is exact while every partial sum stays below 2**53
    exact_float = float(np.abs(np.asarray(w1)).sum()) * float(np.abs(w2).sum()) < 2.0**53
    # chunk rows so each temporary stays near 4M entries
    step = max(1, (1 << 22) // max(1, len(v2)))
    for start in range(0, len(v1), step):
        a = np.asarray(v1[start : start + step], dtype=np.int64)
        wa = np.asarray(w1[start : start + step])
        idx = (a[:, None] + v2[None, :]).ravel()
        wts = (wa[:, None] * w2[None, :]).ravel()
        if out.dtype.kind == "f":
            out += np.bincount(idx, weights=wts, minlength=len(out))[: len(out)]
        elif exact_float:
            out += np.rint(np.bincount(idx, weights=wts.astype(np.float64), minlength=len(out))).astype(out.dtype)
        else:
            np.add.at(out, idx, wts)


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _monic(a: list[int], p: int) -> list[int]:
    inv = pow(a[-1], p - 2, p)
    return [c * inv % p for c in a]


def _rem(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            for j in range(dm):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
            a[i] = 0
    return _trim(a[:dm])


def _mulrem(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    tmp = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                tmp[i + j] += x * y
    return _rem([t % p for t in tmp], m, p)


def _sqrrem(a: list[int], m: list[int], p: int) -> list[int]:
    n = len(a)
    if not n:
        return []
    tmp = [0] * (2 * n - 1)
    for i, x in enumerate(a):
        if x:
            tmp[2 * i] += x * x
            t = 2 * x
            for j in range(i + 1, n):
                tmp[i + j] += t * a[j]
    return _rem([t % p for t in tmp], m, p)


def _mul_linear(a: list[int], delta: int, m: list[int], p: int) -> list[int]:
    """a * (x + delta) mod (m, p) for monic m with deg a < deg m."""
    r = [0] + a
    for i, c in enumerate(a):
        r[i] += delta * c
    dm = len(m) - 1
    if len(r) > dm:
        c = r[dm] % p
        r = r[:dm]
        for j in range(dm):
            r[j] -= c * m[j]
    return _trim([x % p for x in r])


def _powrem(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    """base^e mod (m, p), m monic. Linear bases use left-to-right squaring with a cheap multiply step."""
    if len(base) == 2 and base[1] == 1:
        r = _rem([1], m, p)
        for bit in bin(e)[2:]:
            r = _sqrrem(r, m, p)
            if bit == "1":
                r = _mul_linear(r, base[0], m, p)
        return r
    r = [1]
    b = _rem(base, m, p)
    while e:
        if e & 1:
            r = _mulrem(r, b, m, p)
        e >>= 1
        if e:
            b = _mulrem(b, b, m, p)
    return r


def _gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        b = _monic(b, p)
        a, b = b, _rem(a, b, p)
    return _monic(a, p) if a else a


def _divexact(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    q = [0] * (len(a) - dm)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        q[i - dm] = c
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return q


def _split(g: list[int], p: int, roots: list[int]) -> None:
    dg = len(g) - 1
    if dg <= 0:
        return
    if dg == 1:
        roots.append((-g[0]) % p)
        return
    if dg == 2 and p > 2:
        # g monic with two distinct roots: (-b +- sqrt(b^2 - 4c)) / 2
        c, b = g[0], g[1]
        r = sqrt_mod((b * b - 4 * c) % p, p)
        inv2 = (p + 1) // 2
        roots += [(-b + r) * inv2 % p, (-b - r) * inv2 % p]
        return
    for delta in range(p):
        h = _powrem([delta, 1], (p - 1) // 2, g, p)
        h = h + [0] * (1 - len(h)) if not h else h
        h[0] = (h[0] - 1) % p
        d = _gcd(g, _trim(h), p)
        if 0 < len(d) - 1 < dg:
            _split(d, p, roots)
            _split(_divexact(g, d, p), p, roots)
            return


def roots_mod_p(coeffs, p: int) -> np.ndarray:
    f = _trim([int(c) % p for c in coeffs])
    if not f:
        raise ValueError("polynomial vanishes identically mod p")
    if len(f) == 1:
        return np.empty(0, dtype=np.int64)
    if p <= 4096:
        x = np.arange(p, dtype=np.int64)
        r = np.zeros_like(x)
        for c in reversed(f):
            r = (r * x + c) % p
        return np.flatnonzero(r == 0).astype(np.int64)
    f = _monic(f, p)
    xp = _powrem([0, 1], p, f, p)
    xp = xp + [0] * (2 - len(xp))
    xp[1] = (xp[1] - 1) % p
    xp = _trim(xp)
    g = _gcd(f, xp, p) if xp else f
    roots: list[int] = []
    _split(g, p, roots)
    return np.array(sorted(roots), dtype=np.int64)
