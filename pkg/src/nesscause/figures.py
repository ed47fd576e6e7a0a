"""Figure rendering for traces and bench summaries.

Everything draws through the Agg backend and goes straight to a file; no
display is ever opened. Plots stay deliberately plain: a fluent timeline is
a step raster with event labels, a bench summary is two bars per verdict
bucket.
"""

from __future__ import annotations

from typing import Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .simulator import Trace


def render_timeline(trace: Trace, path: str) -> None:
    """Write a PNG showing each fluent's truth value over the trace."""
    fluents = sorted(f.name for f in trace.context.fluents)
    times = list(range(len(trace.states)))
    fig, ax = plt.subplots(
        figsize=(max(4.0, 1.2 * len(times)), max(2.5, 0.45 * len(fluents) + 1.5))
    )
    for row, name in enumerate(fluents):
        values = [
            1 if any(l.positive and l.fluent.name == name for l in s) else 0
            for s in trace.states
        ]
        ax.step(times, [row + 0.35 * v for v in values], where="post")
        ax.axhline(row, color="0.9", zorder=0)
    for t, fired in enumerate(trace.events):
        if fired:
            label = ", ".join(sorted(e.name for e in fired))
            ax.axvline(t + 0.5, color="0.8", linestyle=":", zorder=0)
            ax.text(
                t + 0.5,
                len(fluents) - 0.3,
                label,
                rotation=90,
                fontsize=7,
                ha="right",
                va="top",
            )
    ax.set_yticks(range(len(fluents)))
    ax.set_yticklabels(fluents)
    ax.set_xticks(times)
    ax.set_xlabel("time")
    ax.set_title(trace.context.name)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_bench_summary(
    rows: Sequence[Tuple[str, bool, bool]], path: str
) -> None:
    """Write a PNG summarising bench rows as (label, ness, butfor) buckets."""
    buckets = {
        "both": 0,
        "ness only": 0,
        "butfor only": 0,
        "neither": 0,
    }
    for _, ness, butfor in rows:
        if ness and butfor:
            buckets["both"] += 1
        elif ness:
            buckets["ness only"] += 1
        elif butfor:
            buckets["butfor only"] += 1
        else:
            buckets["neither"] += 1
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    names = list(buckets)
    ax.bar(names, [buckets[n] for n in names], color="#5b8db8")
    ax.set_ylabel("action occurrences")
    ax.set_title("cause verdicts: NESS vs but-for")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
