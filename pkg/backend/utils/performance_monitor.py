"""
Stage timings for analysis reports
"""
import functools
import json
import logging
import os
import time
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class PerformanceMonitor:
    def __init__(self):
        self.metrics: Dict[str, float] = {}
        self._open: List[tuple] = []

    def start_operation(self, operation_name: str):
        """Start timing an operation"""
        self._open.append((operation_name, time.perf_counter()))
        logger.debug(f"starting {operation_name}")

    def end_operation(self, operation_name: Optional[str] = None):
        """End timing the innermost open operation"""
        if not self._open:
            return
        name, started = self._open.pop()
        operation = operation_name or name
        duration = time.perf_counter() - started
        # Repeated stages accumulate.
        self.metrics[operation] = self.metrics.get(operation, 0.0) + duration
        logger.debug(f"completed {operation} in {duration:.3f}s")

    @contextmanager
    def stage(self, name: str):
        self.start_operation(name)
        try:
            yield
        finally:
            self.end_operation(name)

    def add_metric(self, name: str, value: float):
        """Add a custom metric"""
        self.metrics[name] = value

    def reset(self):
        self.metrics = {}
        self._open = []

    def get_summary(self) -> Dict[str, Any]:
        return {
            "total_time": sum(self.metrics.values()),
            "operations": dict(self.metrics),
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }

    def log_summary(self):
        summary = self.get_summary()
        logger.info(f"total {summary['total_time']:.3f}s over {len(self.metrics)} stages")
        for operation, duration in self.metrics.items():
            logger.info(f"  {operation}: {duration:.3f}s")

    def save_metrics(self, filename: Optional[str] = None):
        """Save metrics to file"""
        if not filename:
            filename = f"timings_{datetime.now(timezone.utc).strftime('%Y%m%d_%H%M%S')}.json"
        os.makedirs(os.path.dirname(filename) or ".", exist_ok=True)
        with open(filename, "w") as f:
            json.dump(self.get_summary(), f, indent=2)
        logger.info(f"timings saved to {filename}")


# Global performance monitor instance
performance_monitor = PerformanceMonitor()


def monitor_performance(operation_name: Optional[str] = None, monitor: Optional[PerformanceMonitor] = None):
    """Decorator recording a function's wall time under operation_name."""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            target = monitor or performance_monitor
            with target.stage(operation_name or func.__name__):
                return func(*args, **kwargs)
        return wrapper
    return decorator
