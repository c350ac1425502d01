"""Figure rendering for CLI reports.

Each helper writes one PNG and a sibling CSV carrying the plotted numbers,
so the pictures are reproducible from their own data files.  Rendering is
file-only (Agg backend) and keeps PNG metadata fixed, which makes repeated
renders of the same report byte-identical.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .caii import CaiiAnalysis, items_needed_to_clear  # noqa: E402
from .model import ppi  # noqa: E402

PNG_METADATA = {"Software": "rm-auctions"}


def _finish(fig, png_path: str) -> None:
    fig.tight_layout()
    fig.savefig(png_path, dpi=120, metadata=PNG_METADATA)
    plt.close(fig)


def _write_csv(csv_path: str, header: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def save_low_side_chart(analysis: CaiiAnalysis, png_path: str, csv_path: str) -> None:
    """The sorted small-demand side as a skyline: bar width is demand, bar
    height is price per item.  Shades the lottery candidates, marks the
    runner-up, and rules the supply k and the sale target ceil(k/2)."""
    low = analysis.classified.low
    k = analysis.classified.k
    half = items_needed_to_clear(k)

    fig, ax = plt.subplots(figsize=(7, 4))
    left = 0
    rows = []
    for pos, b in enumerate(low, start=1):
        height = float(ppi(b))
        if pos < analysis.runner_up_pos:
            color = "#4878a8"
        elif pos == analysis.runner_up_pos:
            color = "#c44e52"
        else:
            color = "#b0b0b0"
        ax.bar(left, height, width=b.demand, align="edge", color=color, edgecolor="white")
        rows.append((pos, b.id, b.demand, str(ppi(b)), b.dummy))
        left += b.demand

    ax.axvline(k, color="black", linestyle="--", linewidth=1, label=f"supply k={k}")
    ax.axvline(half, color="gray", linestyle=":", linewidth=1, label=f"sale target {half}")
    ax.set_xlabel("cumulative demand")
    ax.set_ylabel("price per item")
    ax.set_title("small-demand side (red bar: runner-up)")
    ax.legend(loc="upper right", fontsize=8)
    _finish(fig, png_path)
    _write_csv(csv_path, ("position", "id", "demand", "price_per_item", "dummy"), rows)


def save_allocation_curves(
    curves: Mapping[str, tuple[Fraction, Fraction]],
    bid_ceiling: Fraction,
    png_path: str,
    csv_path: str,
) -> None:
    """Step plots of each winner's allocation curve: zero below the critical
    bid, the winning probability at and above it.  `curves` maps bidder id
    to (critical bid, win probability)."""
    fig, ax = plt.subplots(figsize=(7, 4))
    top = float(max(bid_ceiling, Fraction(1)))
    rows = []
    for bid_id, (crit, prob) in sorted(curves.items()):
        c, p = float(crit), float(prob)
        ax.step([0, c, c, top], [0, 0, p, p], where="post", label=bid_id)
        rows.append((bid_id, str(crit), str(prob)))
    ax.set_xlabel("reported valuation")
    ax.set_ylabel("win probability")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("winner allocation curves")
    if curves:
        ax.legend(fontsize=8)
    _finish(fig, png_path)
    _write_csv(csv_path, ("id", "critical_bid", "win_prob"), rows)


def save_group_scores(
    scores: Sequence[tuple[str, Fraction]],
    winning_group: str,
    reserve: Fraction,
    png_path: str,
    csv_path: str,
) -> None:
    """Bar chart of per-group scores with the reserve line."""
    fig, ax = plt.subplots(figsize=(7, 4))
    labels = [gid for gid, _ in scores]
    heights = [float(v) for _, v in scores]
    colors = ["#c44e52" if gid == winning_group else "#4878a8" for gid in labels]
    ax.bar(labels, heights, color=colors)
    ax.axhline(float(reserve), color="black", linestyle="--", linewidth=1, label="reserve")
    ax.set_ylabel("group score")
    ax.set_title("group selection (red: winning group)")
    ax.legend(fontsize=8)
    _finish(fig, png_path)
    _write_csv(
        csv_path,
        ("group", "score", "winning"),
        [(gid, str(v), gid == winning_group) for gid, v in scores],
    )


def save_revenue_convergence(
    running_mean: Sequence[float],
    analytic: Fraction,
    png_path: str,
    csv_path: str,
) -> None:
    """Running empirical mean revenue against the analytic expectation."""
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = range(1, len(running_mean) + 1)
    ax.plot(list(xs), list(running_mean), linewidth=1, label="empirical mean")
    ax.axhline(float(analytic), color="#c44e52", linestyle="--", label="analytic")
    ax.set_xlabel("trials")
    ax.set_ylabel("mean revenue")
    ax.set_title("sampled revenue convergence")
    ax.legend(fontsize=8)
    _finish(fig, png_path)
    _write_csv(
        csv_path,
        ("trial", "running_mean"),
        [(i, m) for i, m in zip(xs, running_mean)],
    )


def save_ratio_histogram(
    ratios: Sequence[float], bound: float, png_path: str, csv_path: str
) -> None:
    """Histogram of welfare ratios from a campaign with the bound marked."""
    fig, ax = plt.subplots(figsize=(7, 4))
    if ratios:
        ax.hist(ratios, bins=min(40, max(5, len(ratios) // 10 + 1)), color="#4878a8")
    ax.axvline(bound, color="#c44e52", linestyle="--", label=f"bound {bound:.6g}")
    ax.set_xlabel("optimal welfare / expected welfare")
    ax.set_ylabel("instances")
    ax.set_title("welfare ratio distribution")
    ax.legend(fontsize=8)
    _finish(fig, png_path)
    _write_csv(csv_path, ("ratio",), [(r,) for r in ratios])
