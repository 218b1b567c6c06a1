"""Step timing and memory readings for uniquant commands."""

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass

import psutil

from uniquant.typedefs import JsonDict

logger = logging.getLogger(__name__)

BYTES_PER_MB = 1024 * 1024


def _rss_mb() -> float:
    try:
        return psutil.Process().memory_info().rss / BYTES_PER_MB
    except psutil.Error:
        return 0.0


@dataclass
class PerformanceStep:
    name: str
    start_time: float
    end_time: float | None = None
    memory_before_mb: float = 0
    memory_after_mb: float = 0

    @property
    def duration_ms(self) -> float:
        if self.end_time is None:
            return 0
        return (self.end_time - self.start_time) * 1000

    @property
    def memory_delta_mb(self) -> float:
        return self.memory_after_mb - self.memory_before_mb


class PerformanceProfiler:
    """Times the named phases of one command (load, decompose, solve, write)."""

    def __init__(self) -> None:
        self.steps: dict[str, PerformanceStep] = {}
        self.total_start_time = time.perf_counter()

    @contextmanager
    def step(self, name: str) -> Iterator[PerformanceStep]:
        current = PerformanceStep(name=name, start_time=time.perf_counter(), memory_before_mb=_rss_mb())
        self.steps[name] = current
        logger.debug(f"Started step: {name} (Memory: {current.memory_before_mb:.1f}MB)")
        try:
            yield current
        finally:
            current.end_time = time.perf_counter()
            current.memory_after_mb = _rss_mb() or current.memory_before_mb
            logger.debug(
                f"Completed step: {name} ({current.duration_ms:.1f}ms, "
                f"Delta: {current.memory_delta_mb:+.1f}MB)"
            )

    def get_summary(self) -> JsonDict:
        total_ms = (time.perf_counter() - self.total_start_time) * 1000
        return {
            "total_duration_ms": total_ms,
            "steps": {
                name: {
                    "duration_ms": step.duration_ms,
                    "memory_delta_mb": step.memory_delta_mb,
                    "percentage_of_total": step.duration_ms / total_ms * 100 if total_ms > 0 else 0,
                }
                for name, step in self.steps.items()
            },
        }

    def log_summary(self) -> None:
        summary = self.get_summary()
        logger.info(f"Total duration: {summary['total_duration_ms']:.1f}ms")
        by_duration = sorted(summary["steps"].items(), key=lambda item: item[1]["duration_ms"], reverse=True)
        for name, metrics in by_duration:
            logger.info(
                f"  {name}: {metrics['duration_ms']:.1f}ms "
                f"({metrics['percentage_of_total']:.1f}%) "
                f"[{metrics['memory_delta_mb']:+.1f}MB]"
            )
