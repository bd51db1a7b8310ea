"""Figures written next to the CSV reports (Agg backend, files only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def spacing_figure(results, path) -> Path:
    """Histogram of per-window spacings for every (pattern, reader) result."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4), dpi=100)
    expected = None
    for pattern, reader, rep in results:
        label = pattern if reader in ("", "-") else f"{pattern} / {reader}"
        ax.hist(rep.spacings_px, bins=30, alpha=0.6, label=f"{label} ({rep.mean_px:.2f} px)")
        expected = rep.expected_px if rep.expected_px is not None else expected
    if expected is not None:
        ax.axvline(expected, color="k", linestyle="--", linewidth=1, label=f"expected {expected:.2f} px")
    ax.set_xlabel("ridge spacing (px)")
    ax.set_ylabel("windows")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def score_figure(matrix, path) -> Path:
    """Genuine and imposter score distributions, one panel per reader pair."""
    path = Path(path)
    k = len(matrix.readers)
    fig, axes = plt.subplots(k, k, figsize=(3 * k + 1, 2.4 * k + 0.6), dpi=100, squeeze=False)
    top = max(max(c.genuine.max(), c.imposter.max()) for c in matrix.cells.values())
    bins = np.linspace(0.0, max(top, matrix.threshold) * 1.02 + 1e-9, 40)
    for r, er in enumerate(matrix.readers):
        for c_, pr in enumerate(matrix.readers):
            ax = axes[r][c_]
            cell = matrix.cell(er, pr)
            ax.hist(cell.imposter, bins=bins, color="tab:red", alpha=0.6, label="imposter")
            ax.hist(cell.genuine, bins=bins, color="tab:blue", alpha=0.6, label="genuine")
            ax.axvline(matrix.threshold, color="k", linewidth=0.8)
            ax.set_title(f"{er} -> {pr}", fontsize=8)
            ax.tick_params(labelsize=7)
    axes[0][0].legend(fontsize=7)
    fig.supxlabel("score")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
