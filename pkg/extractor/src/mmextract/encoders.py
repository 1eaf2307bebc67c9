"""Pluggable text and image encoder backends.

Real backends wrap pretrained models: ``sbert:<checkpoint>`` for 384-dim
sentence vectors and ``xception`` for 2048-dim globally-average-pooled
image features.  Both raise :class:`EncoderUnavailableError` with fetch
instructions when their weights cannot be loaded (they download on first
use and are cached afterwards).

The ``hash`` backend is a deterministic offline stand-in producing vectors
of the same dimensions from content hashes and fixed random projections.
It carries no semantics; it exists so extraction runs and format contracts
can be exercised on machines without model access.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

TEXT_DIM = 384
IMAGE_DIM = 2048

DEFAULT_TEXT_MODEL = "sbert:sentence-transformers/all-MiniLM-L6-v2"
DEFAULT_IMAGE_MODEL = "xception"


class EncoderUnavailableError(Exception):
    """The requested backend cannot run here; the message says how to fix it."""


class HashingTextEncoder:
    """Deterministic bag-of-token-hash vectors (offline testing backend)."""

    name = "hash"
    dim = TEXT_DIM

    def encode(self, texts, batch_size: int = 32) -> np.ndarray:
        rows = np.zeros((len(texts), self.dim), dtype=np.float64)
        for k, text in enumerate(texts):
            for token in text.lower().split():
                digest = hashlib.sha256(token.encode("utf-8")).digest()
                token_rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
                rows[k] += token_rng.standard_normal(self.dim)
            norm = np.linalg.norm(rows[k])
            if norm > 0:
                rows[k] /= norm
        return rows.astype(np.float32)


class HashingImageEncoder:
    """Block-averaged pixels through a fixed random projection (offline)."""

    name = "hash"
    dim = IMAGE_DIM
    _projection: np.ndarray | None = None

    @classmethod
    def _proj(cls) -> np.ndarray:
        if cls._projection is None:
            rng = np.random.default_rng(20480)
            cls._projection = (
                rng.standard_normal((3072, IMAGE_DIM)) / math.sqrt(3072)
            ).astype(np.float32)
        return cls._projection

    def encode(self, images, batch_size: int = 8) -> np.ndarray:
        blocks = np.stack([
            np.asarray(img).reshape(32, 8, 32, 8, 3).mean(axis=(1, 3)).reshape(-1)
            for img in images
        ]).astype(np.float32)
        return blocks @ self._proj()


class SbertTextEncoder:
    """Pretrained sentence encoder producing 384-dim vectors."""

    dim = TEXT_DIM

    def __init__(self, checkpoint: str):
        self.name = f"sbert:{checkpoint}"
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError:
            raise EncoderUnavailableError(
                "sentence-transformers is not installed; run "
                "`pip install sentence-transformers` (or use --model hash)"
            ) from None
        try:
            self._model = SentenceTransformer(checkpoint)
        except Exception as exc:
            raise EncoderUnavailableError(
                f"could not load sentence encoder {checkpoint!r}: {exc}. "
                f"Fetch it once on a networked machine with "
                f"SentenceTransformer({checkpoint!r}) so it lands in the local "
                f"HuggingFace cache, or use --model hash for the offline backend"
            ) from None
        actual = self._model.get_sentence_embedding_dimension()
        if actual != self.dim:
            raise EncoderUnavailableError(
                f"encoder {checkpoint!r} produces {actual}-dim vectors; "
                f"this pipeline requires {self.dim}"
            )

    def encode(self, texts, batch_size: int = 32) -> np.ndarray:
        return np.asarray(
            self._model.encode(list(texts), batch_size=batch_size, convert_to_numpy=True),
            dtype=np.float32,
        )


class XceptionImageEncoder:
    """Pretrained Xception backbone, headless with global average pooling.

    Inputs are the [0, 1]-scaled preprocessed pixels; that scaling is kept
    as-is rather than swapped for the backbone's own canonical
    normalization.
    """

    name = "xception"
    dim = IMAGE_DIM

    def __init__(self):
        try:
            from tensorflow import keras
        except ImportError:
            raise EncoderUnavailableError(
                "tensorflow is not installed; run `pip install tensorflow-cpu` "
                "(or use --model hash)"
            ) from None
        try:
            self._model = keras.applications.Xception(
                include_top=False, weights="imagenet", pooling="avg"
            )
        except Exception as exc:
            raise EncoderUnavailableError(
                f"could not load pretrained Xception weights: {exc}. Fetch them "
                f"once on a networked machine with "
                f"keras.applications.Xception(weights='imagenet') so they land "
                f"in ~/.keras/models, or use --model hash for the offline backend"
            ) from None

    def encode(self, images, batch_size: int = 8) -> np.ndarray:
        batch = np.stack([np.asarray(img) for img in images]).astype(np.float32)
        return np.asarray(
            self._model.predict(batch, batch_size=batch_size, verbose=0), dtype=np.float32
        )


def build_text_encoder(spec: str = DEFAULT_TEXT_MODEL):
    """Resolve a text encoder spec: ``hash`` or ``sbert:<checkpoint>``."""
    if spec == "hash":
        return HashingTextEncoder()
    if spec.startswith("sbert:"):
        return SbertTextEncoder(spec.split(":", 1)[1])
    raise ValueError(f"unknown text encoder {spec!r} (expected 'hash' or 'sbert:<checkpoint>')")


def build_image_encoder(spec: str = DEFAULT_IMAGE_MODEL):
    """Resolve an image encoder spec: ``hash`` or ``xception``."""
    if spec == "hash":
        return HashingImageEncoder()
    if spec == "xception":
        return XceptionImageEncoder()
    raise ValueError(f"unknown image encoder {spec!r} (expected 'hash' or 'xception')")
