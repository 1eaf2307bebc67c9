"""Dense feed-forward entailment classifiers, trained from scratch.

Two fixed architectures are shipped, one per sub-task:

* image entailment: 4097 -> 5000 (ReLU, dropout 0.5) -> 3 (sigmoid)
* text entailment:  769 -> 450 (ReLU, dropout 0.55, activity reg)
                        -> 450 (ReLU, dropout 0.4, activity reg) -> 3 (sigmoid)

The output head is deliberately sigmoid-then-softmax: the final layer's
three sigmoid outputs are pushed through a softmax, and cross-entropy is
taken against that.  Activity regularization is an L2 penalty on a layer's
post-activation outputs (taken before dropout masking), scaled by the
layer's coefficient and averaged over the batch.  Dropout is inverted:
surviving activations are scaled by 1/(1-rate) at train time and inference
applies no mask at all.

Everything is plain numpy in float64.  Training, initialization and dropout
are all driven by explicit seeds, so fixed (seed, data, config) reproduces
bit-identical models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

LOG_CLAMP = 1e-12  # floor for probabilities inside the cross-entropy log

DEFAULT_ACTIVITY_REG = 1e-4

TEXT_ENTAIL = "text-entail"
IMAGE_ENTAIL = "image-entail"


class Activation(Enum):
    """Layer nonlinearity; values double as the on-disk codes."""

    RELU = 0
    SIGMOID = 1


@dataclass(frozen=True)
class LayerSpec:
    """Shape and behavior of one fully connected layer."""

    in_dim: int
    out_dim: int
    activation: Activation
    dropout_rate: float = 0.0
    activity_reg_coeff: float = 0.0

    def __post_init__(self) -> None:
        if self.in_dim <= 0 or self.out_dim <= 0:
            raise ValueError(f"layer dims must be positive, got {self.in_dim}x{self.out_dim}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {self.dropout_rate}")
        if not (math.isfinite(self.activity_reg_coeff) and self.activity_reg_coeff >= 0.0):
            raise ValueError(f"activity reg coefficient must be finite and >= 0")


def preset_layers(
    name: str,
    *,
    activity_reg: float = DEFAULT_ACTIVITY_REG,
    dropout: Sequence[float] | None = None,
) -> list[LayerSpec]:
    """Expand an architecture preset to its layer list.

    ``dropout`` overrides the hidden-layer rates (one value per hidden
    layer); ``activity_reg`` sets the text model's hidden-layer penalty.
    """
    if name == IMAGE_ENTAIL:
        rates = list(dropout) if dropout is not None else [0.5]
        if len(rates) != 1:
            raise ValueError(f"{name} takes 1 dropout rate, got {len(rates)}")
        return [
            LayerSpec(4097, 5000, Activation.RELU, rates[0], 0.0),
            LayerSpec(5000, 3, Activation.SIGMOID, 0.0, 0.0),
        ]
    if name == TEXT_ENTAIL:
        rates = list(dropout) if dropout is not None else [0.55, 0.4]
        if len(rates) != 2:
            raise ValueError(f"{name} takes 2 dropout rates, got {len(rates)}")
        return [
            LayerSpec(769, 450, Activation.RELU, rates[0], activity_reg),
            LayerSpec(450, 450, Activation.RELU, rates[1], activity_reg),
            LayerSpec(450, 3, Activation.SIGMOID, 0.0, 0.0),
        ]
    raise ValueError(f"unknown preset {name!r} (expected {TEXT_ENTAIL!r} or {IMAGE_ENTAIL!r})")


@dataclass
class MlpModel:
    """Layer specs plus their weight matrices (in_dim x out_dim) and biases.

    Weight rows are indexed by input unit.  The final layer must have three
    sigmoid outputs, one per entailment class.
    """

    layers: list[LayerSpec]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    seed: int = 0  # initialization seed, provenance only

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValueError("model must have at least one layer")
        if not (len(self.layers) == len(self.weights) == len(self.biases)):
            raise ValueError("layers, weights and biases must align")
        for k, (spec, w, b) in enumerate(zip(self.layers, self.weights, self.biases)):
            if w.shape != (spec.in_dim, spec.out_dim):
                raise ValueError(f"layer {k} weight shape {w.shape} != {(spec.in_dim, spec.out_dim)}")
            if b.shape != (spec.out_dim,):
                raise ValueError(f"layer {k} bias shape {b.shape} != {(spec.out_dim,)}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {k} has non-finite parameters")
            if k > 0 and spec.in_dim != self.layers[k - 1].out_dim:
                raise ValueError(
                    f"layer {k} in_dim {spec.in_dim} != layer {k - 1} out_dim "
                    f"{self.layers[k - 1].out_dim}"
                )
        last = self.layers[-1]
        if last.out_dim != 3 or last.activation is not Activation.SIGMOID:
            raise ValueError("final layer must have 3 sigmoid outputs")

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    def copy(self) -> "MlpModel":
        return MlpModel(
            list(self.layers),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.seed,
        )


def init_model(layers: Sequence[LayerSpec] | str, seed: int) -> MlpModel:
    """Build a model with Glorot-uniform weights and zero biases.

    ``layers`` is either an explicit spec list or a preset name
    (``TEXT_ENTAIL`` / ``IMAGE_ENTAIL``).  Deterministic for a fixed seed.
    """
    specs = preset_layers(layers) if isinstance(layers, str) else list(layers)
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for spec in specs:
        bound = math.sqrt(6.0 / (spec.in_dim + spec.out_dim))
        weights.append(rng.uniform(-bound, bound, size=(spec.in_dim, spec.out_dim)))
        biases.append(np.zeros(spec.out_dim))
    return MlpModel(specs, weights, biases, seed=seed)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax(a: np.ndarray) -> np.ndarray:
    shifted = a - a.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _as_batch(model: MlpModel, x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != model.in_dim:
        raise ValueError(
            f"input dim {arr.shape[-1] if arr.ndim else '?'} does not match "
            f"model in_dim {model.in_dim}"
        )
    return arr, single


def _run_forward(model: MlpModel, x: np.ndarray, rng: np.random.Generator | None):
    """Forward pass keeping per-layer caches for backprop.

    Returns (probs, caches) where each cache is (h_in, z, a, mask); ``a`` is
    the post-activation output before dropout, ``mask`` the already-scaled
    inverted-dropout mask (None when inactive).
    """
    caches = []
    h = x
    for spec, w, b in zip(model.layers, model.weights, model.biases):
        z = h @ w + b
        if spec.activation is Activation.RELU:
            a = np.maximum(z, 0.0)
        else:
            a = _sigmoid(z)
        mask = None
        out = a
        if rng is not None and spec.dropout_rate > 0.0:
            keep = 1.0 - spec.dropout_rate
            mask = (rng.random(a.shape) < keep) / keep
            out = a * mask
        caches.append((h, z, a, mask))
        h = out
    probs = _softmax(h)
    return probs, caches


def forward(model: MlpModel, x, *, dropout_seed: int | None = None) -> np.ndarray:
    """Class probabilities for one feature vector or a batch.

    Inference mode (default) is deterministic and applies no dropout;
    passing ``dropout_seed`` enables seeded inverted dropout.
    """
    batch, single = _as_batch(model, x)
    rng = None if dropout_seed is None else np.random.default_rng(dropout_seed)
    probs, _ = _run_forward(model, batch, rng)
    return probs[0] if single else probs


def _check_batch(model: MlpModel, x, y) -> tuple[np.ndarray, np.ndarray]:
    bx = np.asarray(x, dtype=np.float64)
    by = np.asarray(y, dtype=np.float64)
    if bx.ndim != 2 or bx.shape[0] == 0:
        raise ValueError("batch must be a non-empty 2-D array")
    if bx.shape[1] != model.in_dim:
        raise ValueError(f"input dim {bx.shape[1]} does not match model in_dim {model.in_dim}")
    if by.shape != (bx.shape[0], 3):
        raise ValueError(f"labels must be one-hot with shape ({bx.shape[0]}, 3), got {by.shape}")
    return bx, by


def _loss_from_forward(model: MlpModel, probs: np.ndarray, caches, y: np.ndarray) -> float:
    n = y.shape[0]
    ce = -np.sum(y * np.log(np.maximum(probs, LOG_CLAMP))) / n
    reg = 0.0
    for spec, (_, _, a, _) in zip(model.layers, caches):
        if spec.activity_reg_coeff > 0.0:
            reg += spec.activity_reg_coeff * np.sum(a * a) / n
    return float(ce + reg)


def loss(model: MlpModel, x, y, *, dropout_seed: int | None = None) -> float:
    """Mean cross-entropy of softmax(sigmoid outputs) plus activity penalties."""
    bx, by = _check_batch(model, x, y)
    rng = None if dropout_seed is None else np.random.default_rng(dropout_seed)
    probs, caches = _run_forward(model, bx, rng)
    return _loss_from_forward(model, probs, caches, by)


def _backprop(model: MlpModel, x: np.ndarray, y: np.ndarray, rng):
    """Loss and exact parameter gradients for one batch."""
    probs, caches = _run_forward(model, x, rng)
    total = _loss_from_forward(model, probs, caches, y)
    n = y.shape[0]

    # Softmax + cross-entropy collapse to (p - y)/n; the log clamp is never
    # active because softmax of sigmoid outputs is bounded below by
    # 1/(1 + 2e) per class.
    grad_out = (probs - y) / n

    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(model.layers)
    for k in range(len(model.layers) - 1, -1, -1):
        spec = model.layers[k]
        h_in, z, a, mask = caches[k]
        grad_a = grad_out if mask is None else grad_out * mask
        if spec.activity_reg_coeff > 0.0:
            grad_a = grad_a + (2.0 * spec.activity_reg_coeff / n) * a
        if spec.activation is Activation.RELU:
            grad_z = grad_a * (z > 0.0)
        else:
            grad_z = grad_a * a * (1.0 - a)
        grads[k] = (h_in.T @ grad_z, grad_z.sum(axis=0))
        if k > 0:
            grad_out = grad_z @ model.weights[k].T
    return total, grads


def gradients(
    model: MlpModel, x, y, *, dropout_seed: int | None = None
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-layer (dW, db) gradients of :func:`loss` for a batch.

    With ``dropout_seed`` set, gradients are taken through the fixed masks
    that seed generates (identical to the masks ``loss`` would draw).
    """
    bx, by = _check_batch(model, x, y)
    rng = None if dropout_seed is None else np.random.default_rng(dropout_seed)
    _, grads = _backprop(model, bx, by, rng)
    return grads


@dataclass
class TrainConfig:
    """Mini-batch training settings; defaults suit both shipped presets."""

    optimizer: str = "adam"
    learning_rate: float = 1e-3
    batch_size: int = 64
    epochs: int = 30
    seed: int = 0
    shuffle: bool = True
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"optimizer must be 'adam' or 'sgd', got {self.optimizer!r}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def fit(model: MlpModel, x, y, config: TrainConfig | None = None) -> tuple[MlpModel, list[float]]:
    """Train in place; returns the model and the mean loss per epoch.

    One generator seeded by ``config.seed`` drives both epoch shuffling and
    dropout masks, so a fixed (model, data, config) is bit-reproducible.
    """
    config = config or TrainConfig()
    bx, by = _check_batch(model, x, y)
    n = bx.shape[0]
    rng = np.random.default_rng(config.seed)

    adam_m = [(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(model.weights, model.biases)]
    adam_v = [(np.zeros_like(w), np.zeros_like(b)) for w, b in zip(model.weights, model.biases)]
    step = 0

    history: list[float] = []
    for _ in range(config.epochs):
        order = rng.permutation(n) if config.shuffle else np.arange(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            batch_loss, grads = _backprop(model, bx[idx], by[idx], rng)
            epoch_loss += batch_loss * idx.size
            step += 1
            for k, (gw, gb) in enumerate(grads):
                if config.optimizer == "sgd":
                    model.weights[k] -= config.learning_rate * gw
                    model.biases[k] -= config.learning_rate * gb
                    continue
                mw, mb = adam_m[k]
                vw, vb = adam_v[k]
                mw *= config.adam_beta1
                mw += (1 - config.adam_beta1) * gw
                mb *= config.adam_beta1
                mb += (1 - config.adam_beta1) * gb
                vw *= config.adam_beta2
                vw += (1 - config.adam_beta2) * gw * gw
                vb *= config.adam_beta2
                vb += (1 - config.adam_beta2) * gb * gb
                c1 = 1 - config.adam_beta1**step
                c2 = 1 - config.adam_beta2**step
                model.weights[k] -= config.learning_rate * (mw / c1) / (np.sqrt(vw / c2) + config.adam_eps)
                model.biases[k] -= config.learning_rate * (mb / c1) / (np.sqrt(vb / c2) + config.adam_eps)
        history.append(epoch_loss / n)
    return model, history


def predict(model: MlpModel, x) -> tuple[np.ndarray | int, np.ndarray]:
    """Argmax class index (ties to the lowest index) plus the probabilities."""
    probs = forward(model, x)
    if probs.ndim == 1:
        return int(np.argmax(probs)), probs
    return np.argmax(probs, axis=1), probs


def onehot(indices, num_classes: int = 3) -> np.ndarray:
    """One-hot encode integer class indices as float64 rows."""
    idx = np.asarray(indices, dtype=np.int64)
    out = np.zeros((idx.shape[0], num_classes))
    out[np.arange(idx.shape[0]), idx] = 1.0
    return out
