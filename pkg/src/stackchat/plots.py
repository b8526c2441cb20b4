"""Figure rendering for the analytics report path.

Writes PNG files next to the delimited metrics output: a scatter with the
fitted sentiment-vs-rating line, and a bar chart of mean scaled rating by
FSM-turn share bucket.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_sentiment_regression(
    points: list[tuple[float, float]],
    slope: float,
    intercept: float,
    path: str | Path,
) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    ax.scatter(xs, ys, s=12, alpha=0.5, label="turns")
    if xs:
        lo, hi = min(xs), max(xs)
        ax.plot(
            [lo, hi],
            [slope * lo + intercept, slope * hi + intercept],
            color="crimson",
            label=f"fit: y = {slope:.3f}x + {intercept:.2f}",
        )
    ax.set_xlabel("utterance sentiment")
    ax.set_ylabel("scaled conversation rating")
    ax.set_title("Sentiment vs scaled rating")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_fsm_fraction_buckets(
    buckets: list[tuple[float, float, int]],
    bucket_width: float,
    path: str | Path,
) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    xs = [b for b, _, _ in buckets]
    ys = [m for _, m, _ in buckets]
    ns = [n for _, _, n in buckets]
    ax.bar(xs, ys, width=bucket_width * 0.9, align="edge", color="steelblue")
    for x, y, n in zip(xs, ys, ns):
        ax.annotate(f"n={n}", (x + bucket_width * 0.45, y), ha="center", va="bottom", fontsize=7)
    ax.set_xlabel("share of FSM-provided turns")
    ax.set_ylabel("mean scaled rating")
    ax.set_title("FSM-turn share vs scaled rating")
    ax.set_xlim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
