from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import psutil

from quotatope.utils.config import get_settings

T = TypeVar("T")
R = TypeVar("R")


def worker_count(requested: Optional[int] = None) -> int:
    """Resolve the worker cap: explicit request, then QUOTATOPE_THREADS, then physical cores."""
    if requested:
        return requested
    configured = get_settings().threads
    if configured:
        return configured
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Map fn over items on a thread pool, keeping input order."""
    items = list(items)
    count = min(worker_count(workers), max(len(items), 1))
    if count <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=count) as executor:
        return list(executor.map(fn, items))
