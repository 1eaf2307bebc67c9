"""Synthetic claim/document fixtures with planted separable structure.

Real deployments derive embeddings from pretrained encoders; this generator
exists so the end-to-end pipeline can be exercised and verified without any
external data or models.  For each record the gold verdict is decomposed
into its (text, image) sub-labels, and each modality gets a claim/document
vector pair built to match that sub-label: entailed pairs point the same
way (cosine near +0.9), not-entailed pairs are near-orthogonal (cosine near
0) and refuted pairs point opposite ways (cosine near -0.9).  Claims are
also drawn around a per-sub-label direction so the concatenated segments
carry signal beyond the cosine entry.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from mmentail.evec import EvecStore, write_evec
from mmentail.features import IMAGE_DIM, TEXT_DIM
from mmentail.labels import FactifyLabel, decompose
from mmentail.manifest import ManifestRecord, write_manifest

# target claim/document cosine per sub-label index (entailed, not, refuted)
_COSINE_TARGETS = (0.9, 0.0, -0.9)


def _unit(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _pair_for_sublabel(rng, dim, sublabel_index, centers, cosine_jitter, center_spread):
    """A (claim, doc) pair whose cosine sits in the sub-label's regime."""
    claim = centers[sublabel_index] + center_spread * _unit(rng, dim)
    claim /= np.linalg.norm(claim)

    target = _COSINE_TARGETS[sublabel_index] + rng.uniform(-cosine_jitter, cosine_jitter)
    target = min(0.999, max(-0.999, target))
    ortho = rng.standard_normal(dim)
    ortho -= ortho @ claim * claim
    ortho /= np.linalg.norm(ortho)
    doc = target * claim + math.sqrt(1.0 - target * target) * ortho

    # cosine is scale-invariant; vary magnitudes so nothing depends on norms
    return claim * rng.uniform(0.5, 2.0), doc * rng.uniform(0.5, 2.0)


def generate_dataset(
    out_dir,
    n_records: int = 500,
    *,
    seed: int = 0,
    sample_seed: int | None = None,
    text_dim: int = TEXT_DIM,
    image_dim: int = IMAGE_DIM,
    cosine_jitter: float = 0.05,
    center_spread: float = 0.6,
    label_noise: float = 0.0,
) -> dict[str, str]:
    """Write a manifest plus four embedding stores; returns their paths.

    Verdicts cycle through all five classes, so every class is present for
    any ``n_records`` >= 5.  ``seed`` fixes the class geometry (sub-label
    direction centers); ``sample_seed`` (default ``seed + 1``) draws the
    record vectors, so two calls sharing ``seed`` produce train/eval splits
    of one distribution.  ``label_noise`` is the per-modality probability
    that a record's vectors are generated from a wrong sub-label regime
    while the manifest keeps the true verdict; a noisy split like this
    makes well-trained classifiers disagree with gold (and with each
    other, producing invalid label pairs).
    """
    if n_records < 1:
        raise ValueError("n_records must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    centers_rng = np.random.default_rng(seed)
    rng = np.random.default_rng(seed + 1 if sample_seed is None else sample_seed)

    text_centers = [_unit(centers_rng, text_dim) for _ in range(3)]
    image_centers = [_unit(centers_rng, image_dim) for _ in range(3)]

    labels = list(FactifyLabel)
    records = []
    text_claims: dict[str, np.ndarray] = {}
    text_docs: dict[str, np.ndarray] = {}
    image_claims: dict[str, np.ndarray] = {}
    image_docs: dict[str, np.ndarray] = {}
    for k in range(n_records):
        label = labels[k % len(labels)]
        pair = decompose(label)
        rid = f"rec{k:05d}"
        text_idx, image_idx = pair.text.value, pair.image.value
        if label_noise > 0.0:
            if rng.random() < label_noise:
                text_idx = int((text_idx + rng.integers(1, 3)) % 3)
            if rng.random() < label_noise:
                image_idx = int((image_idx + rng.integers(1, 3)) % 3)
        tc, td = _pair_for_sublabel(
            rng, text_dim, text_idx, text_centers, cosine_jitter, center_spread
        )
        ic, idoc = _pair_for_sublabel(
            rng, image_dim, image_idx, image_centers, cosine_jitter, center_spread
        )
        text_claims[rid] = tc
        text_docs[rid] = td
        image_claims[rid] = ic
        image_docs[rid] = idoc
        records.append(
            ManifestRecord(
                id=rid,
                claim_text=f"synthetic claim {k}",
                document_text=f"synthetic document {k}",
                claim_image=f"images/claim_{k}.png",
                document_image=f"images/document_{k}.png",
                category=label,
            )
        )

    paths = {
        "manifest": str(out / "manifest.jsonl"),
        "text_claims": str(out / "text_claims.evec"),
        "text_docs": str(out / "text_docs.evec"),
        "image_claims": str(out / "image_claims.evec"),
        "image_docs": str(out / "image_docs.evec"),
    }
    write_manifest(records, paths["manifest"])
    write_evec(EvecStore(text_dim, text_claims), paths["text_claims"])
    write_evec(EvecStore(text_dim, text_docs), paths["text_docs"])
    write_evec(EvecStore(image_dim, image_claims), paths["image_claims"])
    write_evec(EvecStore(image_dim, image_docs), paths["image_docs"])
    return paths
