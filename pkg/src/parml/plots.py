"""Scaling figures rendered alongside the report CSV."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_scaling_figures(report, scaling: str, csv_path) -> list:
    """Write wall-time and speedup figures next to the report CSV.

    Returns the written paths: `<stem>_times.png` and `<stem>_speedup.png`.
    """
    csv_path = Path(csv_path)
    stem = csv_path.with_suffix("")
    rows = sorted(report.rows, key=lambda r: r.workers)
    workers = [r.workers for r in rows]
    seconds = [r.seconds for r in rows]
    mode = rows[0].mode if rows else ""

    times_path = Path(f"{stem}_times.png")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(workers, seconds, "o-", label=mode)
    ax.set_xlabel("workers")
    ax.set_ylabel("wall time (s)")
    ax.set_title(f"{scaling} scaling: execution time")
    ax.set_xticks(workers)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(times_path, dpi=120)
    plt.close(fig)

    speedup_path = Path(f"{stem}_speedup.png")
    base = seconds[0] if seconds else 1.0
    ratio = [base / s for s in seconds]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(workers, ratio, "o-", label="measured")
    if scaling == "strong":
        # ideal strong scaling halves the time per doubling
        w0 = workers[0] if workers else 1
        ax.plot(workers, [w / w0 for w in workers], "--", color="gray", label="ideal")
        ax.set_ylabel("speedup vs fewest workers")
    else:
        # ideal weak scaling keeps the time flat as data grows with workers
        ax.plot(workers, [1.0] * len(workers), "--", color="gray", label="ideal")
        ax.set_ylabel("time ratio vs fewest workers")
    ax.set_xlabel("workers")
    ax.set_title(f"{scaling} scaling: {mode}")
    ax.set_xticks(workers)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(speedup_path, dpi=120)
    plt.close(fig)

    return [times_path, speedup_path]
