"""
Asynchronous Grid Module for wavelet-asym

Fans independent evaluations of a scale grid out to worker threads and
collects them back in grid order, so the results never depend on which
evaluation finished first.
"""

import asyncio
import logging
import os
import time
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger("wavelet_asym.async_core")

T = TypeVar("T")


class AsyncGridEvaluator:
    """Concurrent evaluation of one function over a grid of points

    Each evaluation runs in a worker thread; at most max_workers run at the
    same time.
    """

    def __init__(self, max_workers: int = None):
        """Initialize the evaluator

        Args:
            max_workers (int): Concurrent evaluations (default: CPU count, at most 8)
        """
        self.max_workers = max_workers or min(os.cpu_count() or 4, 8)
        if self.max_workers < 1:
            raise ValueError(f"max_workers must be positive, got {max_workers}")

    async def evaluate(self, fn: Callable[[float], T], points: Sequence[float]) -> List[T]:
        """Evaluate fn at every point

        Returns:
            list: Results sorted by point (ties keep their input order)
        """
        start_time = time.time()
        semaphore = asyncio.Semaphore(self.max_workers)

        async def run(index, point):
            async with semaphore:
                result = await asyncio.to_thread(fn, point)
            logger.debug(f"grid point {point:g} done")
            return point, index, result

        tasks = [asyncio.create_task(run(i, p)) for i, p in enumerate(points)]
        results = await asyncio.gather(*tasks)
        results.sort(key=lambda item: (item[0], item[1]))

        logger.debug(f"{len(points)} grid points in {time.time() - start_time:.2f}s "
                     f"with {self.max_workers} workers")
        return [result for _, _, result in results]


def evaluate_grid(fn: Callable[[float], T], points: Sequence[float],
                  max_workers: int = None) -> List[T]:
    """Synchronous entry point: evaluate fn over points concurrently"""
    return asyncio.run(AsyncGridEvaluator(max_workers).evaluate(fn, list(points)))
