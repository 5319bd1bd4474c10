"""Matplotlib renderings saved alongside the delimited report outputs.

All renderers write PNG files and never open interactive windows; matplotlib
is imported lazily with the Agg backend so headless runs work and the data
path stays importable without a display stack.
"""

from __future__ import annotations

import math


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def residual_bars(stats: dict, tolerances: dict, path, title: str):
    """Log-scale bar chart of per-equation residual maxima vs tolerances."""
    plt = _plt()
    eqs = sorted(stats)
    vals = [max(stats[eq], 1e-18) for eq in eqs]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(eqs) + 1.5), 3.2))
    ax.bar(range(len(eqs)), vals, color="#4878a8")
    for i, eq in enumerate(eqs):
        tol = tolerances.get(eq)
        if tol is not None:
            ax.hlines(tol, i - 0.4, i + 0.4, colors="#c44e52",
                      linestyles="--", linewidth=1.2)
    ax.set_yscale("log")
    ax.set_xticks(range(len(eqs)))
    ax.set_xticklabels(eqs, rotation=45, ha="right")
    ax.set_ylabel("max residual")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cap_profile(r, u, curvature, target, path, title: str):
    """Profile curve and achieved-curvature trace of a solved cap."""
    plt = _plt()
    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(5.0, 5.0), sharex=True,
        gridspec_kw={"height_ratios": [2.2, 1.0]})
    ax1.plot(r, u, color="#4878a8")
    ax1.axhline(0.0, color="0.6", linewidth=0.8)
    ax1.set_ylabel("t = u(r)")
    ax1.set_title(title)
    err = [abs(c - target) for c in curvature]
    ax2.semilogy(r, [max(e, 1e-18) for e in err], color="#6a9a48")
    ax2.set_ylabel("|curv - target|")
    ax2.set_xlabel("r")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sweep_heights(rows, path, title: str):
    """Measured cap heights against the bound, grouped by curvature target.

    rows: (apex, target, measured or nan, bound, status) tuples.
    """
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    targets = sorted({row[1] for row in rows})
    cmap = plt.get_cmap("viridis")
    for k, tgt in enumerate(targets):
        color = cmap(0.15 + 0.7 * k / max(len(targets) - 1, 1))
        got = [(r[0], r[2]) for r in rows if r[1] == tgt
               and not math.isnan(r[2])]
        skipped = [r[0] for r in rows if r[1] == tgt and math.isnan(r[2])]
        bound = next(r[3] for r in rows if r[1] == tgt)
        if got:
            ax.plot([g[0] for g in got], [g[1] for g in got], "o",
                    color=color, label=f"target {tgt:g}")
        if skipped:
            ax.plot(skipped, [0.0] * len(skipped), "x", color=color,
                    markersize=5)
        ax.axhline(bound, color=color, linestyle="--", linewidth=1.0)
    ax.set_xlabel("apex height")
    ax.set_ylabel("measured height")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
