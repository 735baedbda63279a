"""Figure rendering for verification reports.

Writes static summary charts next to the delimited report output: the
per-check wall time as a bar chart and the witness counts as a status strip.
Imports matplotlib lazily, with the file-only backend, so library users who
never render pay nothing.
"""

from __future__ import annotations

import os


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_report_figures(reports, figdir):
    """Render summary charts for a list of lemma reports; returns the paths."""
    plt = _plt()
    os.makedirs(figdir, exist_ok=True)
    names = [r["lemma_id"] for r in reports]
    elapsed = [r["elapsed"] for r in reports]
    colors = ["#2a7e43" if r["status"] == "pass" else "#b03a2e" for r in reports]
    paths = []

    fig, ax = plt.subplots(figsize=(9, 0.34 * len(reports) + 1.6))
    ypos = range(len(reports))
    ax.barh(ypos, elapsed, color=colors)
    ax.set_yticks(ypos)
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("wall time (s)")
    ax.set_title("verification checks: elapsed time, colored by status")
    fig.tight_layout()
    out = os.path.join(figdir, "verification_times.png")
    fig.savefig(out, dpi=120)
    plt.close(fig)
    paths.append(out)

    fig, ax = plt.subplots(figsize=(9, 0.34 * len(reports) + 1.6))
    counts = [len(r["failures"]) for r in reports]
    ax.barh(ypos, [max(c, 0.04) for c in counts], color=colors)
    ax.set_yticks(ypos)
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("recorded witnesses")
    npass = sum(r["status"] == "pass" for r in reports)
    ax.set_title(f"failure witnesses per check ({npass}/{len(reports)} passing)")
    fig.tight_layout()
    out = os.path.join(figdir, "verification_witnesses.png")
    fig.savefig(out, dpi=120)
    plt.close(fig)
    paths.append(out)
    return paths
