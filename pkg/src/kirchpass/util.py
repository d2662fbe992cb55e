"""Small shared helpers: thread budget and nested sample grids."""

from __future__ import annotations

import os

import numpy as np


def worker_count() -> int:
    """Internal parallelism cap: THREADS env var, default all cores."""
    raw = os.environ.get("THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def nested_linear(lo: float, hi: float, level: int) -> np.ndarray:
    """2^level + 1 equispaced points; doubling the level adds midpoints only."""
    return np.linspace(lo, hi, 2**level + 1)


def nested_geometric(lo: float, hi: float, level: int) -> np.ndarray:
    """2^level + 1 log-spaced points; nested under level increments."""
    return np.geomspace(lo, hi, 2**level + 1)
