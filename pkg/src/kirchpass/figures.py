"""Figure rendering for the solve report: profiles, traces, path landscape.

Figures land next to the CSV output.  They are a reading aid only; the
machine contract stays with the JSON report and the CSV files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_solution_figure(path: Path, r: np.ndarray, u1: np.ndarray, u2: np.ndarray) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(r, u1, label="local minimizer", lw=1.5)
    ax.plot(r, u2, label="mountain-pass point", lw=1.5)
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel("r")
    ax.set_ylabel("u(r)")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_trace_figure(path: Path, trace1: np.ndarray, trace2: np.ndarray) -> None:
    fig, (ax_lvl, ax_res) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    for trace, name in ((trace1, "ball descent"), (trace2, "path deformation")):
        if trace is None or not len(trace):
            continue
        t = np.atleast_2d(trace)
        ax_lvl.plot(t[:, 0], t[:, 1], label=name, lw=1.2)
        ax_res.semilogy(t[:, 0], np.maximum(t[:, 2], 1e-17), label=name, lw=1.2)
    ax_lvl.set_xlabel("iteration")
    ax_lvl.set_ylabel("level")
    ax_res.set_xlabel("iteration")
    ax_res.set_ylabel("residual")
    ax_res.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_path_figure(path: Path, path_levels: np.ndarray, eta: float | None) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ts = np.linspace(0.0, 1.0, len(path_levels))
    ax.plot(ts, path_levels, marker="o", ms=3, lw=1.2)
    if eta is not None:
        ax.axhline(eta, color="tab:red", lw=0.8, ls="--", label="sphere estimate")
        ax.legend(frameon=False)
    ax.set_xlabel("path parameter")
    ax.set_ylabel("level along final path")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
