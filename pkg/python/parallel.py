"""
Worker pool helper shared by the enumeration and scanning loops.
"""

import logging
import multiprocessing
import os
from typing import Callable, Iterable, List, Optional

logger = logging.getLogger(__name__)

THREADS_ENV = "BQK_THREADS"


def resolve_workers(requested: Optional[int] = None) -> int:
    """
    Worker count from an explicit request, else BQK_THREADS, else 1.

    Raises:
        ValueError: if the value is not a positive integer
    """
    if requested is None:
        raw = os.getenv(THREADS_ENV)
        if raw is None or raw.strip() == "":
            return 1
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got: {raw!r}")
    if requested < 1:
        raise ValueError(f"Worker count must be at least 1, got {requested}")
    return requested


def apply_pool(func: Callable, arguments: Iterable, workers: int = 1) -> List:
    """
    Apply func to every argument tuple, in order.

    Results come back in argument order whatever the worker count, so callers
    can merge them deterministically. func must be a module-level function.

    Args:
        func: Function to call as func(*args)
        arguments: Iterable of argument tuples (bare values are wrapped)
        workers: Number of processes; 1 runs inline

    Returns:
        List of results aligned with arguments
    """
    arguments = [arg if isinstance(arg, tuple) else (arg,) for arg in arguments]
    if workers <= 1 or len(arguments) <= 1:
        return [func(*arg) for arg in arguments]
    logger.debug(f"Dispatching {len(arguments)} work units to {workers} workers")
    with multiprocessing.Pool(processes=min(workers, len(arguments))) as pool:
        return pool.starmap(func, arguments)
