import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "RELU_PREIMAGE_THREADS"


def max_workers(requested=None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def thread_map(fn, items, workers=None) -> list:
    """``list(map(fn, items))``, possibly threaded; order follows ``items``."""
    items = list(items)
    n = max_workers(workers)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
