"""Figures for the CLI report path. Rendering uses the non-interactive Agg backend."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (9.0, 3.2),
    "figure.dpi": 100,
    "font.size": 8,
    "axes.linewidth": 0.6,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "image.cmap": "RdBu_r",
    "image.interpolation": "nearest",
    "savefig.dpi": 150,
}
PINK = "#e377c2"


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # drop the version stamp so identical inputs give identical files
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_profile(P, profile, path, title: str = "") -> Path:
    """Payoff heat map (rows by mean payoff), cluster RPP, and the size profile."""
    P = np.asarray(P)
    order = np.argsort(-P.mean(axis=1), kind="stable")
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 3, constrained_layout=True)
        axes[0].imshow(P[np.ix_(order, order)], vmin=-1, vmax=1)
        axes[0].set_title("payoff (sorted by mean)")
        axes[0].set_xticks([])
        axes[0].set_yticks([])
        axes[1].imshow(profile.rpp, vmin=-1, vmax=1)
        axes[1].set_title("RPP between Nash clusters")
        ax = axes[2]
        x, y = profile.mean_rpp, profile.cluster_sizes
        ax.scatter(x, y, s=12, color="k", zorder=3)
        if profile.fit is not None:
            grid = np.linspace(x.min(), x.max(), 400)
            ax.plot(grid, profile.fit(grid), color=PINK)
        ax.set_xlabel("mean RPP")
        ax.set_ylabel("Nash cluster size")
        if title:
            fig.suptitle(title)
        return _save(fig, path)


def plot_sweep(sweep, path, title: str = "") -> Path:
    """Mean strength over time for every sweep cell, plus convergence fraction."""
    with plt.rc_context(STYLE):
        fig, (ax0, ax1) = plt.subplots(1, 2, constrained_layout=True)
        sizes = sorted({t.pop_size for t in sweep.trajectories})
        cmap = plt.get_cmap("viridis", max(len(sizes), 2))
        for t in sweep.trajectories:
            k = sizes.index(t.pop_size)
            curve = [r.mean_strength for r in t.records] + [t.final_strength]
            ax0.plot(curve, color=cmap(k), lw=0.8, label=str(t.pop_size) if t.seed == sweep.rows[0].seed else None)
        ax0.set_xlabel("iteration")
        ax0.set_ylabel("mean payoff of population")
        ax0.legend(title="population", fontsize=6, frameon=False)
        frac = sweep.convergence_fraction()
        ax1.plot(list(frac), list(frac.values()), "o-", color="k")
        ax1.set_xscale("log", base=2)
        ax1.set_ylim(-0.05, 1.05)
        ax1.set_xlabel("population size")
        ax1.set_ylabel("fraction converged")
        if title:
            fig.suptitle(title)
        return _save(fig, path)
