"""Report figures rendered to files next to the delimited output."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import RougeScore, StrideReport

_BAR_COLORS = ("#4c72b0", "#dd8452", "#55a868")


def rouge_figure(per_id: Mapping[str, RougeScore], overall: RougeScore, path) -> Path:
    """Grouped F1 bars per transcript plus the corpus average."""
    path = Path(path)
    labels = sorted(per_id) + ["average"]
    scores = [per_id[tid] for tid in sorted(per_id)] + [overall]
    width = 0.26
    xs = range(len(labels))
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(labels)), 4.0))
    for offset, (name, pick, color) in enumerate((
            ("R-1", lambda s: s.r1.f1, _BAR_COLORS[0]),
            ("R-2", lambda s: s.r2.f1, _BAR_COLORS[1]),
            ("R-L", lambda s: s.rl.f1, _BAR_COLORS[2]))):
        ax.bar([x + (offset - 1) * width for x in xs], [pick(s) for s in scores],
               width=width, label=name, color=color)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("F1")
    ax.legend(frameon=False)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def distance_figure(distances: Sequence[int], report: StrideReport, path) -> Path:
    """Histogram of per-step boundary distances (in utterances)."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if distances:
        upper = max(distances)
        ax.hist(distances, bins=range(0, upper + 2), color=_BAR_COLORS[0],
                edgecolor="white", align="left")
        ax.axvline(report.mean_utt_distance, color=_BAR_COLORS[1], linestyle="--",
                   label=f"mean {report.mean_utt_distance:.2f}")
        ax.legend(frameon=False)
    ax.set_xlabel("|predicted − gold| (utterances)")
    ax.set_ylabel("steps")
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
