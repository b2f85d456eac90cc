import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primereg import _pykernels
from primereg._backend import BACKEND, kernels

coeff_lists = st.lists(st.integers(-10**12, 10**12), min_size=1, max_size=7)
moduli = st.one_of(st.integers(1, 2**31 - 1), st.integers(2**31, 2**62))


def horner(cs, x, M):
    r = 0
    for c in reversed(cs):
        r = r * x + c
    return r % M


@pytest.mark.parametrize("limit", [0, 1, 2, 3, 100, 10007, 100000])
def test_sieve_oracle(backend, limit):
    got = backend.sieve(limit).tolist()
    want = [n for n in range(2, limit + 1) if all(n % d for d in range(2, int(n**0.5) + 1))] if limit <= 10007 else None
    if want is not None:
        assert got == want
    assert got == _pykernels.sieve(limit).tolist()


@settings(max_examples=80)
@given(cs=coeff_lists, M=moduli, xs=st.lists(st.integers(-(2**40), 2**40), max_size=30))
def test_poly_residues_oracle(backend, cs, M, xs):
    got = backend.poly_residues(np.array(xs, dtype=np.int64), np.array([c % M for c in cs], dtype=np.int64), M)
    assert got.tolist() == [horner(cs, x, M) for x in xs]


@settings(max_examples=80)
@given(M=moduli, data=st.data())
def test_scale_residues_oracle(backend, M, data):
    res = data.draw(st.lists(st.integers(0, M - 1), max_size=30))
    num = data.draw(st.integers(0, M - 1))
    got = backend.scale_residues(np.array(res, dtype=np.int64), num, M)
    assert got.tolist() == [r * num % M for r in res]


@settings(max_examples=60)
@given(
    a=st.dictionaries(st.integers(-500, 500), st.integers(1, 1000), min_size=1, max_size=40),
    b=st.dictionaries(st.integers(-500, 500), st.integers(1, 1000), min_size=1, max_size=40),
    floats=st.booleans(),
)
def test_scatter_sumset_oracle(backend, a, b, floats):
    dt = np.float64 if floats else np.int64
    v1, v2 = np.array(sorted(a), dtype=np.int64), np.array(sorted(b), dtype=np.int64)
    w1 = np.array([a[k] for k in sorted(a)], dtype=dt)
    w2 = np.array([b[k] for k in sorted(b)], dtype=dt)
    lo = int(v1[0] + v2[0])
    out = np.zeros(int(v1[-1] + v2[-1]) - lo + 1, dtype=dt)
    backend.scatter_sumset(v1, w1, v2, w2, out, lo)
    want = np.zeros_like(out)
    for x, wx in a.items():
        for y, wy in b.items():
            want[x + y - lo] += wx * wy
    assert out.tolist() == want.tolist()


@settings(max_examples=60)
@given(
    cs=st.lists(st.integers(-1000, 1000), min_size=2, max_size=6),
    p=st.sampled_from([2, 3, 5, 7, 101, 4099, 65537, 1000003, 998244353]),
)
def test_roots_mod_p_oracle(backend, cs, p):
    if all(c % p == 0 for c in cs):
        with pytest.raises(ValueError):
            backend.roots_mod_p(np.array(cs, dtype=np.int64), p)
        return
    got = sorted(int(r) for r in backend.roots_mod_p(np.array(cs, dtype=np.int64), p))
    assert all(horner(cs, r, p) == 0 for r in got)
    if p <= 4099:
        assert got == [x for x in range(p) if horner(cs, x, p) == 0]
    else:
        # roots of a product of linear factors are all found
        assert len(got) == len(set(got))


def test_split_finds_planted_roots(backend):
    p = 998244353
    roots = [3, 17, 123456789, p - 1]
    poly = [1]
    for r in roots:
        poly = [(x - r * y) % p for x, y in zip([0] + poly, poly + [0])]
    got = sorted(int(r) for r in backend.roots_mod_p(np.array(poly, dtype=np.int64), p))
    assert got == sorted(roots)


def test_pure_env_selects_python():
    env = dict(os.environ, PRIMEREG_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import primereg; print(primereg.BACKEND)"], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "python"


def test_compiled_backend_loaded():
    if os.environ.get("PRIMEREG_PURE"):
        pytest.skip("pure mode requested")
    assert BACKEND == "cython", "compiled extension missing; run pip install -e . --no-build-isolation"
    assert kernels is not _pykernels
