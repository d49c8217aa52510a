import logging
import time
from contextlib import contextmanager
from datetime import datetime
from enum import Enum

import numpy as np

logger = logging.getLogger(__name__)


def _format(value) -> str:
    """Render enums, numpy scalars and sequences the way they are typed on the command line."""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, np.generic):
        return str(value.item())
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)):
        return ",".join(_format(v) for v in value)
    return str(value)


def _metrics(values: dict) -> str:
    return " ".join(f"{key}={_format(val)}" for key, val in values.items())


class OperationLogger:
    """Timed log lines for one command run: a parameter block, steps, and the outcome."""

    def __init__(self, command_name: str, **params):
        self.command_name = command_name
        self.params = params
        self.start_time = None

    def _timestamp(self):
        return datetime.now().strftime("%Y-%m-%d %H:%M:%S")

    def _prefix(self, level: str) -> str:
        return f"[{self._timestamp()}] [{level}] [{self.command_name}]"

    @property
    def elapsed(self) -> float:
        return time.time() - self.start_time if self.start_time else 0.0

    def start(self):
        self.start_time = time.time()
        lines = [
            "----------------------------------------------",
            f"{self._prefix('INFO')} Starting operation...",
        ]
        for key, val in self.params.items():
            if val is None:
                continue
            lines.append(f"| {key.capitalize():<12}: {_format(val)}")
        lines.append("----------------------------------------------")
        logger.info("\n" + "\n".join(lines))

    def step(self, message: str, **metrics):
        suffix = f" {_metrics(metrics)}" if metrics else ""
        logger.debug(f"{self._prefix('DEBUG')} {message}{suffix} (+{self.elapsed:.2f}s)")

    @contextmanager
    def phase(self, name: str, **metrics):
        """Log the wall time of one stage of the operation."""
        began = time.time()
        yield
        self.step(f"{name} took {time.time() - began:.2f}s", **metrics)

    def success(self, message: str = "Completed successfully", **metrics):
        suffix = f" [{_metrics(metrics)}]" if metrics else ""
        logger.info(f"{self._prefix('INFO')} {message}{suffix} in {self.elapsed:.2f}s")

    def fail(self, message: str = "Operation failed", exc: Exception = None, exit_code=None):
        code = f" (exit {int(exit_code)})" if exit_code is not None else ""
        exc_info = (type(exc), exc, exc.__traceback__) if exc is not None else None
        logger.error(f"{self._prefix('ERROR')} {message}{code} after {self.elapsed:.2f}s", exc_info=exc_info)
