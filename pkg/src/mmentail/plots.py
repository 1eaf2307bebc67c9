"""Confusion-matrix figure rendering for evaluation reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from mmentail.metrics import CLASS_NAMES


def render_confusion(counts, path, title: str | None = None) -> str:
    """Render a 5x5 confusion matrix heatmap with per-cell counts to a file.

    The file format follows the extension (png, pdf, svg, ...).  Returns the
    written path.
    """
    counts = np.asarray(counts)
    if counts.shape != (5, 5):
        raise ValueError(f"expected a 5x5 matrix, got shape {counts.shape}")

    fig, ax = plt.subplots(figsize=(7.2, 6.0))
    image = ax.imshow(counts, cmap="Blues")
    fig.colorbar(image, ax=ax, fraction=0.046, pad=0.04)

    ax.set_xticks(range(5), CLASS_NAMES, rotation=35, ha="right")
    ax.set_yticks(range(5), CLASS_NAMES)
    ax.set_xlabel("predicted")
    ax.set_ylabel("gold")
    if title:
        ax.set_title(title)

    threshold = counts.max() / 2 if counts.max() > 0 else 0
    for row in range(5):
        for col in range(5):
            ax.text(
                col,
                row,
                str(int(counts[row, col])),
                ha="center",
                va="center",
                color="white" if counts[row, col] > threshold else "black",
                fontsize=9,
            )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(Path(path))
