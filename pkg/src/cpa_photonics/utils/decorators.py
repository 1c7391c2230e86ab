"""Utility decorators."""

import logging
import time
from datetime import datetime
from functools import wraps
from typing import Callable, TypeVar, cast

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable)


def measure_time(func: F) -> F:
    """Log wall-clock start, end and elapsed time of a call.

    Args:
        func: Function to measure

    Returns:
        Wrapped function
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        logger.info("-" * 70)
        logger.info(
            f"{func.__qualname__} started at {datetime.now():%Y-%m-%d %H:%M:%S}"
        )

        result = func(*args, **kwargs)

        elapsed = time.perf_counter() - start
        minutes = int(elapsed // 60)
        seconds = elapsed - 60 * minutes
        logger.info(f"{func.__qualname__} finished in {minutes:02d}:{seconds:06.3f}")
        return result

    return cast(F, wrapper)
