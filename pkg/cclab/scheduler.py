"""
Scheduler module for cclab - runs independent grid evaluations on a worker pool.
"""

import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .settings import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Global scheduler instance
scheduler = None
_lock = threading.Lock()


class SweepScheduler:
    """Order-preserving parallel map over sweep points."""

    def __init__(self, threads: Optional[int] = None):
        requested = settings.threads if threads is None else threads
        self.threads = requested if requested > 0 else (os.cpu_count() or 1)
        self._executor = ThreadPoolExecutor(max_workers=self.threads) if self.threads > 1 else None

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Results come back in input order whatever order the workers finish in."""
        items = list(items)
        if self._executor is None or len(items) < 2:
            return [fn(item) for item in items]
        return list(self._executor.map(fn, items))

    def shutdown(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None


def get_scheduler() -> SweepScheduler:
    """Get the shared scheduler, creating it on first use."""
    global scheduler

    with _lock:
        if scheduler is None:
            scheduler = SweepScheduler()
            logger.debug(f"Sweep scheduler started with {scheduler.threads} thread(s)")
        return scheduler


def stop_scheduler():
    """Stop the shared scheduler."""
    global scheduler

    with _lock:
        if scheduler is not None:
            scheduler.shutdown()
            scheduler = None
            logger.debug("Sweep scheduler stopped")
