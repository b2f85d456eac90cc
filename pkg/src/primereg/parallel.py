"""Deterministic chunked parallel map.

Work is cut into chunks whose boundaries depend only on the input length and
``chunk``, never on the thread count, and results are reassembled in order.
Any reduction the caller performs over the returned list is therefore
independent of ``threads``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def chunk_bounds(n: int, chunk: int) -> list[tuple[int, int]]:
    chunk = max(1, int(chunk))
    return [(i, min(n, i + chunk)) for i in range(0, n, chunk)]


def parallel_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def map_chunks(fn: Callable[[int, int], R], n: int, chunk: int, threads: int = 1) -> list[R]:
    """Apply ``fn(lo, hi)`` to fixed chunks of ``range(n)``; results in chunk order."""
    return parallel_map(lambda b: fn(*b), chunk_bounds(n, chunk), threads)


def tree_sum(values: Sequence):
    """Pairwise (fixed-tree) summation; the order depends only on ``len(values)``."""
    vals = list(values)
    if not vals:
        return 0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]
