"""Decomposed multi-modal entailment pipeline for five-class fact verification.

Train two shallow entailment classifiers (text and image) on paired
embedding vectors, consolidate their label pairs into five verdict classes,
and evaluate with weighted F1 and confusion matrices.
"""

from mmentail.labels import (
    DEFAULT_HEURISTIC,
    FactifyLabel,
    HEURISTIC_B,
    HEURISTICS,
    Heuristic,
    ImageLabel,
    LabelPair,
    PROSE_A,
    TABLE_A,
    TextLabel,
    compose,
    consolidate,
    decompose,
    get_heuristic,
    invalid_pairs,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_HEURISTIC",
    "FactifyLabel",
    "HEURISTIC_B",
    "HEURISTICS",
    "Heuristic",
    "ImageLabel",
    "LabelPair",
    "PROSE_A",
    "TABLE_A",
    "TextLabel",
    "compose",
    "consolidate",
    "decompose",
    "get_heuristic",
    "invalid_pairs",
    "__version__",
]
