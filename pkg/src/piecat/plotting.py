"""Bar charts of suite outcomes, written next to the structured report."""

from __future__ import annotations

import os
from collections import Counter

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .core import FAIL, PASS  # noqa: E402

COLORS = {PASS: "#4c9a2a", FAIL: "#c0392b", "skip": "#b0b0b0"}


def suite_figure(report, path: str | os.PathLike) -> str:
    """Stacked pass/fail/skip counts per instance kind."""
    counts = Counter((r.kind or "-", r.verdict) for r in report.records)
    kinds = sorted({k for k, _ in counts})
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(kinds) + 2), 3.2))
    bottom = [0] * len(kinds)
    for verdict in (PASS, FAIL, "skip"):
        vals = [counts.get((k, verdict), 0) for k in kinds]
        if any(vals):
            ax.bar(kinds, vals, bottom=bottom, color=COLORS[verdict], label=verdict)
            bottom = [b + v for b, v in zip(bottom, vals)]
    ax.set_ylabel("instances")
    ax.set_title(f"{report.suite} (seed {report.seed}): {report.status}")
    ax.legend(frameon=False, fontsize="small")
    ax.tick_params(axis="x", labelrotation=20, labelsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return str(path)
