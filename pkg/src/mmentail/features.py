"""Classifier input assembly: [claim | cosine(claim, doc) | doc].

A claim embedding and a document embedding of equal dimension d are joined
into a single feature vector of dimension 2*d + 1 with their cosine
similarity as the middle entry.  Text embeddings (d = 384) yield 769-dim
features; image embeddings (d = 2048) yield 4097-dim features.

All arithmetic is done in float64 regardless of input dtype.
"""

from __future__ import annotations

import numpy as np

TEXT_DIM = 384
IMAGE_DIM = 2048


def as_embedding(values, name: str = "embedding") -> np.ndarray:
    """Validate and convert to a finite, non-empty 1-D float64 vector."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"embedding dimensions differ: {a.shape[0]} vs {b.shape[0]}"
        )


def cosine(a, b) -> float:
    """Cosine similarity, clamped to [-1, 1]; 0 if either vector has zero norm."""
    va = as_embedding(a, "a")
    vb = as_embedding(b, "b")
    _check_same_dim(va, vb)
    norm_a = np.linalg.norm(va)
    norm_b = np.linalg.norm(vb)
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    value = float(np.dot(va, vb) / (norm_a * norm_b))
    return float(min(1.0, max(-1.0, value)))


def assemble(claim, doc) -> np.ndarray:
    """Concatenate claim, cosine similarity and document into one feature row."""
    vc = as_embedding(claim, "claim")
    vd = as_embedding(doc, "doc")
    _check_same_dim(vc, vd)
    out = np.empty(2 * vc.shape[0] + 1, dtype=np.float64)
    d = vc.shape[0]
    out[:d] = vc
    out[d] = cosine(vc, vd)
    out[d + 1 :] = vd
    return out


def split_features(features) -> tuple[np.ndarray, float, np.ndarray]:
    """Inverse of :func:`assemble`: recover (claim, cosine, doc) segments."""
    arr = np.asarray(features, dtype=np.float64)
    if arr.ndim != 1 or arr.size % 2 == 0 or arr.size < 3:
        raise ValueError(f"feature vector must have odd length >= 3, got shape {arr.shape}")
    d = arr.size // 2
    return arr[:d].copy(), float(arr[d]), arr[d + 1 :].copy()
