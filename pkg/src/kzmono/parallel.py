"""Worker-count policy for the optional parallel sections.

KZM_THREADS caps the pool size; the default is the machine's core count.
Results are always reassembled in submission order, so parallel and serial
runs emit identical output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    env = os.environ.get("KZM_THREADS")
    cores = os.cpu_count() or 1
    if env:
        try:
            cap = int(env)
        except ValueError:
            return cores
        if cap >= 1:
            return min(cap, cores)
    return cores


def map_ordered(fn, items):
    """Apply fn to items, possibly in parallel, preserving order."""
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
