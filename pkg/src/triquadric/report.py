"""Delimited count tables and the figures rendered alongside them.

The counting oracle's report path writes a CSV of plane counts per prime and
a log-log figure of the fit used to read off the growth degree.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .fano import CountRecord


def write_count_table(records: list[CountRecord], path) -> Path:
    """CSV table `p,t,count`, one row per record."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "t", "count"])
        for r in sorted(records, key=lambda r: r.p):
            writer.writerow([r.p, r.t, r.count])
    return path


def render_count_fit(
    records: list[CountRecord],
    fitted_degree: int | None,
    reference_dim: int | None,
    path,
    title: str = "planes in the quadric over F_p",
) -> Path:
    """Log-log scatter of count against p with the fitted growth line."""
    path = Path(path)
    recs = sorted(records, key=lambda r: r.p)
    xs = [r.p for r in recs]
    ys = [r.count for r in recs]

    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.loglog(xs, ys, "o", color="#1f77b4", label="exhaustive count")
    if fitted_degree is not None and ys[0] > 0:
        scale = ys[0] / xs[0] ** fitted_degree
        grid = [xs[0] * (xs[-1] / xs[0]) ** (k / 40) for k in range(41)]
        ax.loglog(
            grid,
            [scale * g**fitted_degree for g in grid],
            "--",
            color="#d62728",
            label=f"slope {fitted_degree}",
        )
    label = f"fitted degree {fitted_degree}" if fitted_degree is not None else ""
    if reference_dim is not None:
        label += f", family dimension {reference_dim}"
    ax.set_xlabel("p")
    ax.set_ylabel("count")
    ax.set_title(title + ("\n" + label if label else ""), fontsize=10)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
