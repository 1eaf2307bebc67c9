"""Confusion matrix, per-class precision/recall/F1 and weighted F1.

The matrix is 5x5 over the verdict classes in canonical order, rows = gold,
columns = predicted.  Division-by-zero conventions: an empty predicted
column gives precision 0, an empty gold row gives recall 0, and p + r = 0
gives F1 = 0.  Weighted F1 averages per-class F1 with weights proportional
to gold support, so zero-support classes contribute nothing.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from mmentail.labels import FactifyLabel

CLASS_ORDER: tuple[FactifyLabel, ...] = tuple(FactifyLabel)
CLASS_NAMES: tuple[str, ...] = tuple(label.value for label in CLASS_ORDER)

_INDEX = {label: k for k, label in enumerate(CLASS_ORDER)}


def confusion(gold: Sequence[FactifyLabel], pred: Sequence[FactifyLabel]) -> np.ndarray:
    """Count matrix with cell (g, p) = #examples gold=g predicted=p."""
    if len(gold) != len(pred):
        raise ValueError(f"gold and pred lengths differ: {len(gold)} vs {len(pred)}")
    if len(gold) == 0:
        raise ValueError("cannot build a confusion matrix from zero examples")
    counts = np.zeros((5, 5), dtype=np.int64)
    for g, p in zip(gold, pred):
        counts[_INDEX[g], _INDEX[p]] += 1
    return counts


def report(counts: np.ndarray) -> dict:
    """Per-class precision/recall/F1/support plus weighted F1.

    Returns a JSON-ready dict: {"per_class": {label: {...}}, "weighted_f1":
    float, "labels": [...], "confusion": [[...]]}.  Raw counts are included
    so other conventions can be recomputed downstream.
    """
    counts = np.asarray(counts)
    if counts.shape != (5, 5) or np.any(counts < 0):
        raise ValueError(f"expected a non-negative 5x5 count matrix, got shape {counts.shape}")
    total = int(counts.sum())
    if total == 0:
        raise ValueError("confusion matrix is empty (all cells zero)")

    row_sums = counts.sum(axis=1)
    col_sums = counts.sum(axis=0)
    per_class: dict[str, dict] = {}
    weighted_f1 = 0.0
    for k, name in enumerate(CLASS_NAMES):
        tp = float(counts[k, k])
        precision = tp / col_sums[k] if col_sums[k] > 0 else 0.0
        recall = tp / row_sums[k] if row_sums[k] > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        support = int(row_sums[k])
        per_class[name] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": support,
        }
        weighted_f1 += (support / total) * f1
    return {
        "labels": list(CLASS_NAMES),
        "per_class": per_class,
        "weighted_f1": weighted_f1,
        "confusion": counts.tolist(),
    }


def confusion_to_csv(counts: np.ndarray) -> str:
    r"""Render the matrix as CSV: header 'gold\pred,<labels>' then one row per class."""
    lines = ["gold\\pred," + ",".join(CLASS_NAMES)]
    for name, row in zip(CLASS_NAMES, np.asarray(counts)):
        lines.append(name + "," + ",".join(str(int(c)) for c in row))
    return "\n".join(lines) + "\n"


def write_confusion_csv(counts: np.ndarray, path) -> None:
    Path(path).write_text(confusion_to_csv(counts), encoding="utf-8")


def write_report_json(rep: dict, path) -> None:
    Path(path).write_text(json.dumps(rep, indent=2) + "\n", encoding="utf-8")
