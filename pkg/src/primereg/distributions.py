"""Weighted value distributions for meet-in-the-middle counting.

A distribution maps integer values u to weights w(u); sums of independent
variables correspond to sumsets (convolutions) of distributions, and the number
of weighted solutions of ``left = right + b`` is an inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import GuardError

DENSE_LIMIT = 1 << 26
DEFAULT_BUDGET = 2 << 30  # bytes


@dataclass(frozen=True)
class ValueDist:
    values: np.ndarray  # sorted, unique, int64
    weights: np.ndarray  # int64 or float64, same length

    def __len__(self) -> int:
        return len(self.values)

    @property
    def total(self):
        return self.weights.sum()

    @classmethod
    def from_values(cls, values, weights=None) -> ValueDist:
        v = np.asarray(values, dtype=np.int64)
        w = np.ones(len(v), dtype=np.int64) if weights is None else np.asarray(weights)
        if len(v) == 0:
            return cls(v, w)
        uniq, inv = np.unique(v, return_inverse=True)
        if w.dtype.kind == "f":
            agg = np.bincount(inv, weights=w, minlength=len(uniq))
        else:
            agg = np.zeros(len(uniq), dtype=np.int64)
            np.add.at(agg, inv, w.astype(np.int64))
        keep = agg != 0
        return cls(uniq[keep], agg[keep])

    def scaled(self, c: int) -> ValueDist:
        """Distribution of c*u."""
        if c == 0:
            return ValueDist(np.zeros(1, dtype=np.int64), np.array([self.weights.sum()]))
        v = self.values * c
        if c < 0:
            return ValueDist(v[::-1].copy(), self.weights[::-1].copy())
        return ValueDist(v, self.weights)

    def shifted(self, b: int) -> ValueDist:
        return ValueDist(self.values + b, self.weights)

    def as_float(self) -> ValueDist:
        return ValueDist(self.values, self.weights.astype(np.float64))


def _common_dtype(a: ValueDist, b: ValueDist):
    if a.weights.dtype.kind == "f" or b.weights.dtype.kind == "f":
        return np.float64
    return np.int64


def sumset(a: ValueDist, b: ValueDist, dense_limit: int = DENSE_LIMIT, budget: int = DEFAULT_BUDGET) -> ValueDist:
    """Distribution of u + v for independent u ~ a, v ~ b."""
    if len(a) == 0 or len(b) == 0:
        return ValueDist(np.empty(0, dtype=np.int64), np.empty(0, dtype=_common_dtype(a, b)))
    if len(a) < len(b):
        a, b = b, a
    dt = _common_dtype(a, b)
    lo = int(a.values[0]) + int(b.values[0])
    hi = int(a.values[-1]) + int(b.values[-1])
    span = hi - lo + 1
    if span <= dense_limit and span * 8 <= budget:
        out = np.zeros(span, dtype=dt)
        kernels.scatter_sumset(a.values, a.weights.astype(dt), b.values, b.weights.astype(dt), out, lo)
        nz = np.flatnonzero(out)
        return ValueDist(nz.astype(np.int64) + lo, out[nz])
    pairs = len(a) * len(b)
    if pairs * 16 * 2 > budget * 4:
        raise GuardError(f"sparse sumset of {pairs} pairs exceeds the memory budget")
    parts_v, parts_w = [], []
    step = max(1, (1 << 22) // len(b))
    for s in range(0, len(a), step):
        va = a.values[s : s + step]
        wa = a.weights[s : s + step].astype(dt)
        v = (va[:, None] + b.values[None, :]).ravel()
        w = (wa[:, None] * b.weights.astype(dt)[None, :]).ravel()
        d = ValueDist.from_values(v, w)
        parts_v.append(d.values)
        parts_w.append(d.weights)
    return ValueDist.from_values(np.concatenate(parts_v), np.concatenate(parts_w))


def sum_of(dists: list[ValueDist], **kw) -> ValueDist:
    if not dists:
        return ValueDist(np.zeros(1, dtype=np.int64), np.ones(1, dtype=np.int64))
    acc = dists[0]
    for d in dists[1:]:
        acc = sumset(acc, d, **kw)
    return acc


def _exact_dot(x: np.ndarray, y: np.ndarray):
    if x.dtype.kind == "f" or y.dtype.kind == "f":
        return float(np.dot(x.astype(np.float64), y.astype(np.float64)))
    if len(x) == 0:
        return 0
    bound = int(np.abs(x).max()) * int(np.abs(y).max()) * len(x)
    if bound < (1 << 62):
        return int(np.dot(x, y))
    step = max(1, (1 << 62) // max(1, int(np.abs(x).max()) * int(np.abs(y).max())))
    total = 0
    for s in range(0, len(x), step):
        total += int(np.dot(x[s : s + step], y[s : s + step]))
    return total


def count_equal(left: ValueDist, right: ValueDist, b: int = 0):
    """Sum over u of left(u) * right(b - u)."""
    rv = (b - right.values)[::-1]
    rw = right.weights[::-1]
    _, i, j = np.intersect1d(left.values, rv, assume_unique=True, return_indices=True)
    return _exact_dot(left.weights[i], rw[j])
