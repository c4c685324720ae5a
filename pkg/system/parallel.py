"""
Thread-pool helper used by the spectrum scans, matrix assembly and FD oracles.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from system.config import THREADS

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], max_workers: int = None) -> List[R]:
    """Apply ``fn`` to every item, preserving input order.

    Args:
        fn: Pure function to apply
        items: Inputs
        max_workers: Worker cap, defaults to PLATE_LAB_THREADS

    Returns:
        The list of results in the order of ``items``
    """
    items = list(items)
    workers = max(1, min(max_workers or THREADS, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
