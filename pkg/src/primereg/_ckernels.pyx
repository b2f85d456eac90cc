# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Every function here has a drop-in twin in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.string cimport memset, memcpy

cnp.import_array()

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

ctypedef unsigned long long u64
ctypedef long long i64

ctypedef fused wtype:
    i64
    double

DEF MAXD = 64

# --------------------------------------------------------------------------
# sieve

def sieve(i64 limit):
    """Ascending int64 array of all primes <= limit."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    cdef i64 n = (limit - 1) // 2          # index i <-> 2*i + 1, i >= 1
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] comp = np.zeros(n + 1, dtype=np.uint8)
    cdef unsigned char* c = <unsigned char*> comp.data
    cdef i64 i, j, p
    i = 1
    while True:
        p = 2 * i + 1
        if p * p > limit:
            break
        if not c[i]:
            j = (p * p - 1) // 2
            while j <= n:
                c[j] = 1
                j += p
        i += 1
    cdef i64 count = 1
    for i in range(1, n + 1):
        if not c[i]:
            count += 1
    out = np.empty(count, dtype=np.int64)
    cdef i64[:] o = out
    o[0] = 2
    j = 1
    for i in range(1, n + 1):
        if not c[i]:
            o[j] = 2 * i + 1
            j += 1
    return out


# --------------------------------------------------------------------------
# exact modular residues

def poly_residues(const i64[:] xs, const i64[:] coeffs, i64 M):
    """f(x) mod M for each x; ``coeffs`` ascending and already reduced into [0, M)."""
    cdef Py_ssize_t n = xs.shape[0], deg = coeffs.shape[0] - 1, i, k
    out = np.empty(n, dtype=np.int64)
    cdef i64[:] o = out
    cdef u64 m = <u64> M, r, x
    cdef i64 xv
    for i in range(n):
        xv = xs[i] % M
        if xv < 0:
            xv += M
        x = <u64> xv
        r = 0
        for k in range(deg, -1, -1):
            r = <u64> ((<u128> r * x + <u64> coeffs[k]) % m)
        o[i] = <i64> r
    return out


def scale_residues(const i64[:] res, i64 num, i64 M):
    """(num * r) mod M elementwise; inputs already in [0, M)."""
    cdef Py_ssize_t n = res.shape[0], i
    out = np.empty(n, dtype=np.int64)
    cdef i64[:] o = out
    cdef u64 m = <u64> M, a = <u64> num
    for i in range(n):
        o[i] = <i64> ((<u128> a * <u64> res[i]) % m)
    return out


# --------------------------------------------------------------------------
# sumset scatter for meet-in-the-middle value distributions

def scatter_sumset(const i64[:] v1, const wtype[:] w1, const i64[:] v2,
                   const wtype[:] w2, wtype[:] out, i64 offset):
    """out[v1[i] + v2[j] - offset] += w1[i] * w2[j]; caller guarantees the range."""
    cdef Py_ssize_t n1 = v1.shape[0], n2 = v2.shape[0], i, j
    cdef i64 base
    cdef wtype a
    for i in range(n1):
        base = v1[i] - offset
        a = w1[i]
        for j in range(n2):
            out[base + v2[j]] += a * w2[j]


# --------------------------------------------------------------------------
# roots of a polynomial modulo a prime

cdef inline u64 mulmod(u64 a, u64 b, u64 p) nogil:
    return <u64> ((<u128> a * b) % p)


cdef u64 powmod(u64 a, u64 e, u64 p) nogil:
    cdef u64 r = 1 % p
    a %= p
    while e:
        if e & 1:
            r = mulmod(r, a, p)
        a = mulmod(a, a, p)
        e >>= 1
    return r


cdef inline int trim(u64* a, int d) nogil:
    while d >= 0 and a[d] == 0:
        d -= 1
    return d


cdef int make_monic(u64* a, int d, u64 p) nogil:
    cdef u64 inv
    cdef int i
    if d < 0 or a[d] == 1:
        return d
    inv = powmod(a[d], p - 2, p)
    for i in range(d + 1):
        a[i] = mulmod(a[i], inv, p)
    return d


cdef int rem_inplace(u64* a, int da, const u64* m, int dm, u64 p) nogil:
    # m monic of degree dm >= 0
    cdef int i, j
    cdef u64 c
    i = da
    while i >= dm:
        c = a[i]
        if c:
            for j in range(dm):
                a[i - dm + j] = (a[i - dm + j] + p - mulmod(c, m[j], p)) % p
            a[i] = 0
        i -= 1
    if da > dm - 1:
        da = dm - 1
    return trim(a, da)


cdef int mulrem(const u64* a, int da, const u64* b, int db, const u64* m, int dm,
                u64 p, u64* out) nogil:
    cdef u64 tmp[2 * MAXD]
    cdef int i, j, d
    if da < 0 or db < 0:
        return -1
    memset(tmp, 0, sizeof(u64) * (da + db + 1))
    for i in range(da + 1):
        if a[i]:
            for j in range(db + 1):
                tmp[i + j] = (tmp[i + j] + mulmod(a[i], b[j], p)) % p
    d = rem_inplace(tmp, da + db, m, dm, p)
    if d >= 0:
        memcpy(out, tmp, sizeof(u64) * (d + 1))
    return d


cdef int powrem(const u64* base, int db, u64 e, const u64* m, int dm, u64 p,
                u64* out) nogil:
    cdef u64 r[MAXD]
    cdef u64 b[MAXD]
    cdef u64 tmp[MAXD]
    cdef int dr = 0, d
    memset(r, 0, sizeof(r))
    memset(b, 0, sizeof(b))
    r[0] = 1
    memcpy(b, base, sizeof(u64) * (db + 1))
    db = rem_inplace(b, db, m, dm, p)
    if dm == 0:
        return -1
    while e:
        if e & 1:
            dr = mulrem(r, dr, b, db, m, dm, p, tmp)
            memcpy(r, tmp, sizeof(u64) * (dr + 1 if dr >= 0 else 0))
        e >>= 1
        if e:
            d = mulrem(b, db, b, db, m, dm, p, tmp)
            db = d
            if d >= 0:
                memcpy(b, tmp, sizeof(u64) * (d + 1))
    if dr >= 0:
        memcpy(out, r, sizeof(u64) * (dr + 1))
    return dr


cdef int pgcd(const u64* a0, int da, const u64* b0, int db, u64 p, u64* out) nogil:
    cdef u64 a[MAXD]
    cdef u64 b[MAXD]
    cdef u64 t[MAXD]
    cdef int dt
    memset(a, 0, sizeof(a))
    memset(b, 0, sizeof(b))
    if da >= 0:
        memcpy(a, a0, sizeof(u64) * (da + 1))
    if db >= 0:
        memcpy(b, b0, sizeof(u64) * (db + 1))
    while db >= 0:
        db = make_monic(b, db, p)
        da = rem_inplace(a, da, b, db, p)
        memset(t, 0, sizeof(t))
        if da >= 0:
            memcpy(t, a, sizeof(u64) * (da + 1))
        memset(a, 0, sizeof(a))
        memcpy(a, b, sizeof(u64) * (db + 1))
        memset(b, 0, sizeof(b))
        if da >= 0:
            memcpy(b, t, sizeof(u64) * (da + 1))
        dt = da
        da = db
        db = dt
    da = make_monic(a, da, p)
    if da >= 0:
        memcpy(out, a, sizeof(u64) * (da + 1))
    return da


cdef int divexact(const u64* a0, int da, const u64* m, int dm, u64 p, u64* q) nogil:
    # quotient of a by monic m (remainder discarded; caller knows it is zero)
    cdef u64 a[MAXD]
    cdef int i, j
    cdef u64 c
    memcpy(a, a0, sizeof(u64) * (da + 1))
    memset(q, 0, sizeof(u64) * MAXD)
    i = da
    while i >= dm:
        c = a[i]
        q[i - dm] = c
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] + p - mulmod(c, m[j], p)) % p
        i -= 1
    return da - dm


cdef void split_roots(const u64* g, int dg, u64 p, list roots):
    # g monic, squarefree, product of distinct linear factors
    cdef u64 base[2]
    cdef u64 h[MAXD]
    cdef u64 d[MAXD]
    cdef u64 q[MAXD]
    cdef int dh, dd, dq
    cdef u64 delta = 0
    if dg <= 0:
        return
    if dg == 1:
        roots.append(<i64> ((p - g[0]) % p))
        return
    while delta < p:
        base[0] = delta
        base[1] = 1
        memset(h, 0, sizeof(h))
        dh = powrem(base, 1, (p - 1) // 2, g, dg, p, h)
        if dh < 0:
            dh = 0
            h[0] = 0
        h[0] = (h[0] + p - 1) % p
        dh = trim(h, dh)
        dd = pgcd(g, dg, h, dh, p, d)
        if 0 < dd < dg:
            dq = divexact(g, dg, d, dd, p, q)
            split_roots(d, dd, p, roots)
            split_roots(q, dq, p, roots)
            return
        delta += 1


def roots_mod_p(const i64[:] coeffs, i64 p):
    """Sorted distinct roots in [0, p) of a nonzero polynomial mod prime p.

    ``coeffs`` ascending, any sign. Degree must be below 63.
    """
    cdef int deg = coeffs.shape[0] - 1, i, dg, dxp
    cdef u64 f[MAXD]
    cdef u64 xp[MAXD]
    cdef u64 g[MAXD]
    cdef u64 base[2]
    cdef u64 P = <u64> p, r, x
    cdef i64 c
    cdef list roots = []
    if deg >= MAXD - 1:
        raise ValueError("degree too large for compiled root finder")
    memset(f, 0, sizeof(f))
    for i in range(deg + 1):
        c = coeffs[i] % p  # C remainder keeps the sign
        f[i] = <u64> (c + p if c < 0 else c)
    deg = trim(f, deg)
    if deg < 0:
        raise ValueError("polynomial vanishes identically mod p")
    if deg == 0:
        return np.empty(0, dtype=np.int64)
    if P <= 128:
        for x in range(P):
            r = 0
            for i in range(deg, -1, -1):
                r = (mulmod(r, x, P) + f[i]) % P
            if r == 0:
                roots.append(<i64> x)
        return np.array(roots, dtype=np.int64)
    deg = make_monic(f, deg, P)
    base[0] = 0
    base[1] = 1
    memset(xp, 0, sizeof(xp))
    dxp = powrem(base, 1, P, f, deg, P, xp)
    if dxp < 1:
        for i in range(dxp + 1, 2):
            xp[i] = 0
        dxp = 1
    xp[1] = (xp[1] + P - 1) % P
    dxp = trim(xp, dxp)
    if dxp < 0:
        memcpy(g, f, sizeof(u64) * (deg + 1))
        dg = deg
    else:
        dg = pgcd(f, deg, xp, dxp, P, g)
    split_roots(g, dg, P, roots)
    roots.sort()
    return np.array(roots, dtype=np.int64)
