"""Report and profile persistence: JSON report, CSV solutions and traces.

Numbers in CSV files are written with 17 significant digits so a reloaded
profile reproduces the solved one bit-exactly; all files are written via a
temp file and an atomic rename.  Timing information lives under the single
"timings" key, which is the only part of a report allowed to differ between
reruns with the same config and seed.
"""

from __future__ import annotations

import json
import math
import os
import platform
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def versions() -> dict:
    from . import __version__

    return {
        "kirchpass": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def _check_finite(obj, path="report"):
    if isinstance(obj, dict):
        for key, val in obj.items():
            _check_finite(val, f"{path}.{key}")
    elif isinstance(obj, (list, tuple)):
        for i, val in enumerate(obj):
            _check_finite(val, f"{path}[{i}]")
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite value at {path}: {obj}")


def write_report(path: Path, report: dict) -> None:
    _check_finite({k: v for k, v in report.items() if k != "timings"})
    _atomic_write(path, json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n")


def write_solution_csv(path: Path, r: np.ndarray, u: np.ndarray) -> None:
    lines = ["r,u"]
    lines += [f"{_fmt(ri)},{_fmt(ui)}" for ri, ui in zip(r, u)]
    _atomic_write(path, "\n".join(lines) + "\n")


def write_trace_csv(path: Path, trace: np.ndarray) -> None:
    lines = ["iter,level,residual,cerami"]
    if trace is not None and len(trace):
        for row in np.atleast_2d(trace):
            lines.append(f"{int(row[0])},{_fmt(row[1])},{_fmt(row[2])},{_fmt(row[3])}")
    _atomic_write(path, "\n".join(lines) + "\n")


def read_solution_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def log(msg: str) -> None:
    """Human-readable progress goes to stderr; exit codes are the contract."""
    print(msg, file=sys.stderr)
