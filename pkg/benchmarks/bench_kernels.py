"""Time the compiled kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from primereg import _pykernels
from primereg._backend import BACKEND, kernels


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(rng: np.random.Generator):
    xs = rng.integers(0, 10**9, 200_000, dtype=np.int64)
    small_M, big_M = 999_983, (1 << 61) - 1
    coeffs = np.array([7, 0, -3, 1], dtype=np.int64)
    v1 = np.unique(rng.integers(0, 200_000, 3000)).astype(np.int64)
    v2 = np.unique(rng.integers(0, 200_000, 3000)).astype(np.int64)
    w1, w2 = np.ones(len(v1), dtype=np.int64), np.ones(len(v2), dtype=np.int64)
    span = int(v1[-1] + v2[-1] - v1[0] - v2[0]) + 1
    cubic = np.array([5, 0, 0, 1], dtype=np.int64)

    def sumset(k):
        out = np.zeros(span, dtype=np.int64)
        k.scatter_sumset(v1, w1, v2, w2, out, int(v1[0] + v2[0]))

    return {
        "sieve(10^7)": lambda k: k.sieve(10**7),
        "poly_residues small M": lambda k: k.poly_residues(xs, coeffs % small_M, small_M),
        "poly_residues 61-bit M": lambda k: k.poly_residues(xs, coeffs % big_M, big_M),
        "scale_residues 61-bit M": lambda k: k.scale_residues(xs, 123456789, big_M),
        "scatter_sumset 3000x3000": sumset,
        "roots_mod_p x^3+5, p=998244353": lambda k: k.roots_mod_p(cubic, 998244353),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="write timings to this file")
    ns = ap.parse_args(argv)

    if BACKEND != "cython":
        print("compiled extension not available; only the python backend is timed")
    rows = []
    for name, fn in workloads(np.random.default_rng(ns.seed)).items():
        py = _time(lambda: fn(_pykernels), ns.repeat)
        cy = _time(lambda: fn(kernels), ns.repeat) if BACKEND == "cython" else float("nan")
        rows.append({"kernel": name, "python_s": py, "cython_s": cy, "speedup": py / cy})
        print(f"{name:34s} python {py * 1e3:9.2f} ms   cython {cy * 1e3:9.2f} ms   x{py / cy:7.1f}")
    if ns.json:
        with open(ns.json, "w") as fh:
            json.dump({"backend": BACKEND, "repeat": ns.repeat, "rows": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
