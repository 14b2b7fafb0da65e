"""Figures for the self-test report (written only with ``--figures``)."""

from __future__ import annotations

import os
from collections import Counter
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def cell_histogram(counts: List[int], path: str) -> str:
    """Number of translated formulas by cell count of their normal form."""
    hist = Counter(counts)
    ks = sorted(hist)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.bar([str(k) for k in ks], [hist[k] for k in ks], color="#4c72b0")
        ax.set_xlabel("cells k in the normal form")
        ax.set_ylabel("formulas")
        ax.set_title("Normal form sizes over the equivalence sweep")
        return _save(fig, path)


def truth_table(rows: List[List[bool]], path: str) -> str:
    """Truth of the curated sentences in P(n); rows are sentences."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4, 6))
        data = [[1 if t else 0 for t in row] for row in rows]
        ax.imshow(data, cmap="Greys", aspect="auto", vmin=0, vmax=1.6)
        n = len(rows[0]) if rows else 0
        ax.set_xticks(range(n))
        ax.set_xticklabels([str(i + 1) for i in range(n)])
        ax.set_yticks(range(len(rows)))
        ax.set_yticklabels([f"#{i}" for i in range(len(rows))], fontsize=6)
        ax.set_xlabel("n in P(n)")
        ax.set_title("Curated sentences: true (dark) / false")
        return _save(fig, path)


def render_figures(run, outdir: str) -> List[str]:
    os.makedirs(outdir, exist_ok=True)
    out = [cell_histogram(run.figures.get("cell_counts", []), os.path.join(outdir, "fv_cells.png"))]
    rows = run.figures.get("stabilization", [])
    if rows:
        out.append(truth_table(rows, os.path.join(outdir, "powerset_truth.png")))
    return out
