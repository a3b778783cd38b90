"""Chunked evaluation over disjoint index ranges.

Output never depends on the number of workers: each chunk writes its own
slice and reductions are left to the caller.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

MIN_CHUNK = 1 << 16


def worker_count() -> int:
    raw = os.environ.get("GTM_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"GTM_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"GTM_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def chunk_bounds(n: int, workers: int) -> list[tuple[int, int]]:
    parts = max(1, min(workers, -(-n // MIN_CHUNK)))
    edges = np.linspace(0, n, parts + 1).round().astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def map_chunks(func, n: int, out: np.ndarray) -> np.ndarray:
    """Fill ``out[a:b] = func(a, b)`` for a partition of ``range(n)``."""
    bounds = chunk_bounds(n, worker_count())
    if len(bounds) <= 1:
        for a, b in bounds:
            out[a:b] = func(a, b)
        return out

    def run(ab):
        a, b = ab
        out[a:b] = func(a, b)

    with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
        list(pool.map(run, bounds))
    return out
