"""Figures summarizing a batch run, rendered to image files.

Charts read report rows duck-typed: anything with bp_id, expected,
outcome, solved_panels, total_panels, and unsolved attributes works.
"""

from pathlib import Path
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

MATCHED_COLOR = "#2a9d4e"
MISMATCH_COLOR = "#c0392b"
SUSPECT_THRESHOLD = 0.8


def panel_counts_figure(reports: Sequence[object], path: Path) -> None:
    """Horizontal bars of solved panel counts, colored by outcome match."""
    labels = ["BP#%d" % r.bp_id for r in reports]
    counts = [r.solved_panels for r in reports]
    colors = [MATCHED_COLOR if r.outcome == r.expected else MISMATCH_COLOR
              for r in reports]
    total = max((r.total_panels for r in reports), default=12)
    fig, ax = plt.subplots(figsize=(7, 0.4 * len(reports) + 1.2))
    ax.barh(range(len(reports)), counts, color=colors)
    ax.set_yticks(range(len(reports)))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlim(0, total)
    ax.set_xlabel("panels redrawn at match threshold")
    ax.axvline(total, color="#555555", linewidth=0.8, linestyle="--")
    ax.set_title("panel coverage per problem")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def residual_match_figure(reports: Sequence[object], path: Path) -> None:
    """Best match score of every unsolved panel, against both thresholds.

    Points below the lower line are the ones that vote for a
    representation failure; points between the lines are near misses
    that point at the search budget instead.
    """
    xs: List[int] = []
    ys: List[float] = []
    for i, rep in enumerate(reports):
        for _task, _reason, best in rep.unsolved:
            xs.append(i)
            ys.append(best)
    fig, ax = plt.subplots(figsize=(7, 3.6))
    if xs:
        ax.scatter(xs, ys, s=18, color="#34495e", alpha=0.8)
    ax.axhline(SUSPECT_THRESHOLD, color=MISMATCH_COLOR, linewidth=0.9,
               label="representation suspicion cutoff")
    ax.axhline(0.95, color=MATCHED_COLOR, linewidth=0.9,
               label="solve threshold")
    ax.set_xticks(range(len(reports)))
    ax.set_xticklabels(["BP#%d" % r.bp_id for r in reports],
                       rotation=45, ha="right")
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("best F1 of unsolved panels")
    ax.set_title("residual match quality")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_figures(reports: Sequence[object], out_dir) -> List[Path]:
    """Write every report figure under out_dir and return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "panel_coverage.png", out / "residual_match.png"]
    panel_counts_figure(reports, paths[0])
    residual_match_figure(reports, paths[1])
    return paths
