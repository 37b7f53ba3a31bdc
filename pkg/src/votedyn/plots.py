"""Batch figure rendering for run, sweep, and spectrum reports.

Figures are written to files next to the delimited outputs; there is no
interactive display path.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dynamics import Trajectory


def trajectory_figure(traj: Trajectory, path, eps=None, title=None) -> None:
    """Opinion of every agent versus step, for a fully recorded trajectory."""
    data = np.stack([np.asarray(s.to_float().values) for s in traj.states])
    steps = np.arange(data.shape[0])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(steps, data, color="tab:blue", alpha=0.35, lw=0.8)
    ax.axhline(1.0, color="k", lw=0.6)
    ax.axhline(-1.0, color="k", lw=0.6)
    if eps is not None:
        ax.axhline(eps, color="tab:red", ls="--", lw=0.7, label=f"eps = {eps}")
        ax.axhline(-eps, color="tab:red", ls="--", lw=0.7)
        ax.legend(loc="center right", fontsize=8)
    ax.set_xlabel("step")
    ax.set_ylabel("opinion")
    ax.set_ylim(-1.1, 1.1)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sweep_figure(rows, path) -> None:
    """Final split and convergence step as functions of eps."""
    eps = [r.eps for r in rows]
    minus = [sum(c for v, c in r.clusters if v < 0) for r in rows]
    plus = [sum(c for v, c in r.clusters if v > 0) for r in rows]
    steps = [r.step for r in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(eps, minus, "o-", color="tab:red", label="agents at -1")
    ax1.plot(eps, plus, "s-", color="tab:blue", label="agents at +1")
    ax1.set_ylabel("final cluster size")
    ax1.legend(fontsize=8)
    ax2.plot(eps, steps, "d-", color="tab:gray")
    ax2.set_xlabel("eps")
    ax2.set_ylabel("convergence step")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def spectrum_figure(eigenvalues, h, path) -> None:
    """Spectrum of T and of the step matrix E + hT."""
    lam = np.asarray(eigenvalues, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(lam, np.zeros_like(lam), "x", color="tab:blue", label="spectrum of T")
    ax.plot(
        1.0 + h * lam,
        np.ones_like(lam) * 0.2,
        "+",
        color="tab:red",
        label="spectrum of E + hT",
    )
    ax.axvline(0.0, color="k", lw=0.5)
    ax.axvline(1.0, color="k", lw=0.5, ls=":")
    ax.set_yticks([])
    ax.set_xlabel("eigenvalue")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
