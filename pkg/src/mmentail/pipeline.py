"""End-to-end orchestration: join embeddings, train, predict, evaluate.

The pipeline works from five files: a manifest plus four embedding stores
(text-claim, text-doc, image-claim, image-doc; two dims because text and
image encoders differ).  Training decomposes each gold verdict into its
text and image sub-labels and fits one classifier per modality; prediction
runs both classifiers per record and consolidates the sub-label pair back
into a verdict under a configurable heuristic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from mmentail.evec import EvecStore, read_evec
from mmentail.features import IMAGE_DIM, TEXT_DIM, assemble
from mmentail.labels import (
    DEFAULT_HEURISTIC,
    FactifyLabel,
    Heuristic,
    ImageLabel,
    LabelPair,
    TextLabel,
    compose,
    consolidate,
    decompose,
    get_heuristic,
)
from mmentail.manifest import ManifestRecord, load_manifest
from mmentail.metrics import confusion, report
from mmentail.model_io import load_model, save_model
from mmentail.net import (
    DEFAULT_ACTIVITY_REG,
    IMAGE_ENTAIL,
    MlpModel,
    TEXT_ENTAIL,
    TrainConfig,
    fit,
    init_model,
    onehot,
    predict,
    preset_layers,
)

TEXT_MODEL_FILE = "text_entail.nnwt"
IMAGE_MODEL_FILE = "image_entail.nnwt"


class PipelineError(Exception):
    """Raised for data-level problems while orchestrating a run."""


@dataclass
class PipelineConfig:
    """JSON-configurable knobs for a training run; every key is optional."""

    optimizer: str = "adam"
    learning_rate: float = 1e-3
    batch_size: int = 64
    epochs: int = 30
    seed: int = 0
    activity_reg_coeff: float = DEFAULT_ACTIVITY_REG
    text_dropout: list[float] = field(default_factory=lambda: [0.55, 0.4])
    image_dropout: list[float] = field(default_factory=lambda: [0.5])
    heuristic: str = DEFAULT_HEURISTIC.name

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise PipelineError(
                f"unknown config keys: {', '.join(sorted(unknown))} "
                f"(expected a subset of: {', '.join(sorted(known))})"
            )
        return cls(**data)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise PipelineError(f"config file {path}: malformed JSON ({exc.msg})") from None
        if not isinstance(data, dict):
            raise PipelineError(f"config file {path}: expected a JSON object")
        return cls.from_dict(data)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            optimizer=self.optimizer,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.seed,
        )


def join(records: list[ManifestRecord], claim_store: EvecStore, doc_store: EvecStore,
         modality: str = "embedding") -> np.ndarray:
    """Assemble one feature row per record, in manifest order."""
    if claim_store.dim != doc_store.dim:
        raise PipelineError(
            f"{modality} claim/doc stores have different dims: "
            f"{claim_store.dim} vs {doc_store.dim}"
        )
    missing_claim = [r.id for r in records if r.id not in claim_store.entries]
    missing_doc = [r.id for r in records if r.id not in doc_store.entries]
    if missing_claim or missing_doc:
        parts = []
        if missing_claim:
            parts.append(f"missing from {modality} claim store: {', '.join(missing_claim)}")
        if missing_doc:
            parts.append(f"missing from {modality} doc store: {', '.join(missing_doc)}")
        raise PipelineError("; ".join(parts))
    if not records:
        raise PipelineError("manifest has no records")
    return np.stack([
        assemble(claim_store.get(r.id), doc_store.get(r.id)) for r in records
    ])


def _require_feature_dim(features: np.ndarray, expected: int, modality: str, embed_dim: int) -> None:
    if features.shape[1] != expected:
        raise PipelineError(
            f"{modality} features have dim {features.shape[1]}, expected {expected} "
            f"(embedding dim {embed_dim})"
        )


def sub_task_targets(records: list[ManifestRecord]) -> tuple[np.ndarray, np.ndarray]:
    """Per-record one-hot text and image sub-labels, decomposed from gold verdicts."""
    missing = [r.id for r in records if r.category is None]
    if missing:
        raise PipelineError(f"records without a gold category: {', '.join(missing)}")
    pairs = [decompose(r.category) for r in records]
    return (
        onehot([p.text.value for p in pairs]),
        onehot([p.image.value for p in pairs]),
    )


def train_pipeline(
    manifest_path,
    text_claims_path,
    text_docs_path,
    image_claims_path,
    image_docs_path,
    out_dir,
    config: PipelineConfig | None = None,
) -> dict:
    """Train both sub-task models and persist them under ``out_dir``.

    Returns the model paths and per-epoch loss histories.
    """
    config = config or PipelineConfig()
    records = load_manifest(manifest_path)
    if not records:
        raise PipelineError("manifest has no records")
    y_text, y_image = sub_task_targets(records)

    x_text = join(records, read_evec(text_claims_path), read_evec(text_docs_path), "text")
    x_image = join(records, read_evec(image_claims_path), read_evec(image_docs_path), "image")
    _require_feature_dim(x_text, 2 * TEXT_DIM + 1, "text", TEXT_DIM)
    _require_feature_dim(x_image, 2 * IMAGE_DIM + 1, "image", IMAGE_DIM)

    train_cfg = config.train_config()
    text_model = init_model(
        preset_layers(TEXT_ENTAIL, activity_reg=config.activity_reg_coeff,
                      dropout=config.text_dropout),
        seed=config.seed,
    )
    image_model = init_model(
        preset_layers(IMAGE_ENTAIL, dropout=config.image_dropout),
        seed=config.seed + 1,
    )
    _, text_history = fit(text_model, x_text, y_text, train_cfg)
    _, image_history = fit(image_model, x_image, y_image, train_cfg)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text_path = out / TEXT_MODEL_FILE
    image_path = out / IMAGE_MODEL_FILE
    save_model(text_model, text_path)
    save_model(image_model, image_path)
    return {
        "text_model": str(text_path),
        "image_model": str(image_path),
        "text_history": text_history,
        "image_history": image_history,
    }


@dataclass
class PredictionRecord:
    """One record's sub-task outputs and consolidated verdict."""

    id: str
    text_label: TextLabel
    image_label: ImageLabel
    pair_valid: bool
    final_label: FactifyLabel
    text_probs: list[float]
    image_probs: list[float]

    def __post_init__(self) -> None:
        expected_valid = compose(LabelPair(self.text_label, self.image_label)) is not None
        if self.pair_valid != expected_valid:
            raise ValueError(
                f"record {self.id!r}: pair_valid={self.pair_valid} inconsistent with "
                f"pair ({self.text_label}, {self.image_label})"
            )
        if len(self.text_probs) != 3 or len(self.image_probs) != 3:
            raise ValueError(f"record {self.id!r}: probability vectors must have 3 entries")

    @property
    def pair(self) -> LabelPair:
        return LabelPair(self.text_label, self.image_label)

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "text_label": str(self.text_label),
            "image_label": str(self.image_label),
            "pair_valid": self.pair_valid,
            "final_label": self.final_label.value,
            "text_probs": self.text_probs,
            "image_probs": self.image_probs,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PredictionRecord":
        return cls(
            id=obj["id"],
            text_label=TextLabel.parse(obj["text_label"]),
            image_label=ImageLabel.parse(obj["image_label"]),
            pair_valid=bool(obj["pair_valid"]),
            final_label=FactifyLabel.parse(obj["final_label"]),
            text_probs=[float(v) for v in obj["text_probs"]],
            image_probs=[float(v) for v in obj["image_probs"]],
        )


def _load_models(models_dir) -> tuple[MlpModel, MlpModel]:
    models = Path(models_dir)
    text_path = models / TEXT_MODEL_FILE
    image_path = models / IMAGE_MODEL_FILE
    for path in (text_path, image_path):
        if not path.exists():
            raise PipelineError(f"model file not found: {path}")
    return load_model(text_path), load_model(image_path)


def predict_pipeline(
    manifest_path,
    text_claims_path,
    text_docs_path,
    image_claims_path,
    image_docs_path,
    models_dir,
    heuristic: Heuristic | str = DEFAULT_HEURISTIC,
) -> list[PredictionRecord]:
    """Run both classifiers over a manifest and consolidate, in manifest order."""
    if isinstance(heuristic, str):
        heuristic = get_heuristic(heuristic)
    records = load_manifest(manifest_path)
    if not records:
        raise PipelineError("manifest has no records")
    text_model, image_model = _load_models(models_dir)

    x_text = join(records, read_evec(text_claims_path), read_evec(text_docs_path), "text")
    x_image = join(records, read_evec(image_claims_path), read_evec(image_docs_path), "image")
    _require_feature_dim(x_text, text_model.in_dim, "text", (text_model.in_dim - 1) // 2)
    _require_feature_dim(x_image, image_model.in_dim, "image", (image_model.in_dim - 1) // 2)

    text_idx, text_probs = predict(text_model, x_text)
    image_idx, image_probs = predict(image_model, x_image)

    out = []
    for k, record in enumerate(records):
        pair = LabelPair(TextLabel(int(text_idx[k])), ImageLabel(int(image_idx[k])))
        out.append(
            PredictionRecord(
                id=record.id,
                text_label=pair.text,
                image_label=pair.image,
                pair_valid=compose(pair) is not None,
                final_label=consolidate(pair, heuristic),
                text_probs=[float(v) for v in text_probs[k]],
                image_probs=[float(v) for v in image_probs[k]],
            )
        )
    return out


def write_predictions(predictions: list[PredictionRecord], path) -> None:
    """Write predictions as newline-delimited JSON (order-preserving)."""
    with open(path, "w", encoding="utf-8") as handle:
        for pred in predictions:
            handle.write(json.dumps(pred.to_json_dict()) + "\n")


def read_predictions(path) -> list[PredictionRecord]:
    out = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                out.append(PredictionRecord.from_json_dict(json.loads(raw)))
            except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
                raise PipelineError(f"predictions file line {lineno}: {exc}") from None
    return out


def evaluate_predictions(
    predictions: list[PredictionRecord], records: list[ManifestRecord]
) -> tuple[np.ndarray, dict]:
    """Score predictions against manifest gold labels.

    Returns the confusion matrix and the report dict.  Every prediction id
    must have a gold category in the manifest.
    """
    if not predictions:
        raise PipelineError("no predictions to evaluate")
    gold_by_id = {r.id: r.category for r in records}
    missing = [p.id for p in predictions if gold_by_id.get(p.id) is None]
    if missing:
        raise PipelineError(f"predictions without a gold category: {', '.join(missing)}")
    gold = [gold_by_id[p.id] for p in predictions]
    final = [p.final_label for p in predictions]
    counts = confusion(gold, final)
    return counts, report(counts)
