"""
Trial-parallel execution with deterministic aggregation.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from .logger import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_trials(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Apply ``fn`` to every item and return the results in input order.

    All randomness inside ``fn`` must be keyed by stream keys, never by the
    worker, so the result list is identical for any thread count.

    Args:
        fn: Per-trial function
        items: Trial arguments
        threads: Number of worker threads (1 runs inline)

    Returns:
        Results in the order of ``items``
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug(f"Running {len(items)} trials on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
