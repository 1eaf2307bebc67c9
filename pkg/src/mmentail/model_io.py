"""NNWT binary persistence for trained models.

Layout (all integers little-endian, floats IEEE-754 f32):

    magic "NNWT" | u16 version=1 | u16 layer_count
    per layer:
        u32 in_dim | u32 out_dim | u8 activation (0=ReLU, 1=Sigmoid)
        f32 dropout_rate | f32 activity_reg_coeff
        in_dim*out_dim f32 weights, row-major (row = input unit)
        out_dim f32 biases

Parameters are stored at 32-bit precision; loading widens them back to
float64, so save -> load -> save is byte-identical.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from mmentail.net import Activation, LayerSpec, MlpModel

MAGIC = b"NNWT"
VERSION = 1

_HEADER = struct.Struct("<4sHH")
_LAYER_HEADER = struct.Struct("<IIBff")
_F32 = np.dtype("<f4")


class ModelFormatError(Exception):
    """Raised for malformed NNWT data; ``offset`` is the failing byte position."""

    def __init__(self, message: str, *, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


def save_model(model: MlpModel, path) -> None:
    """Write a model to ``path`` in NNWT format."""
    chunks = [_HEADER.pack(MAGIC, VERSION, len(model.layers))]
    for spec, w, b in zip(model.layers, model.weights, model.biases):
        chunks.append(
            _LAYER_HEADER.pack(
                spec.in_dim,
                spec.out_dim,
                spec.activation.value,
                spec.dropout_rate,
                spec.activity_reg_coeff,
            )
        )
        chunks.append(np.ascontiguousarray(w, dtype=_F32).tobytes())
        chunks.append(np.ascontiguousarray(b, dtype=_F32).tobytes())
    Path(path).write_bytes(b"".join(chunks))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int, what: str) -> bytes:
        if self.pos + count > len(self.data):
            raise ModelFormatError(
                f"truncated file: expected {count} bytes for {what}, "
                f"only {len(self.data) - self.pos} left",
                offset=self.pos,
            )
        out = self.data[self.pos : self.pos + count]
        self.pos += count
        return out


def load_model(path) -> MlpModel:
    """Read an NNWT file back into a model (parameters widened to float64)."""
    reader = _Reader(Path(path).read_bytes())
    magic, version, layer_count = _HEADER.unpack(reader.take(_HEADER.size, "file header"))
    if magic != MAGIC:
        raise ModelFormatError(f"not an NNWT file: bad magic {magic!r}", offset=0)
    if version != VERSION:
        raise ModelFormatError(f"unsupported NNWT version {version}", offset=4)
    if layer_count == 0:
        raise ModelFormatError("layer count is zero", offset=6)

    layers: list[LayerSpec] = []
    weights: list[np.ndarray] = []
    biases: list[np.ndarray] = []
    for k in range(layer_count):
        header_offset = reader.pos
        in_dim, out_dim, act_code, drop, reg = _LAYER_HEADER.unpack(
            reader.take(_LAYER_HEADER.size, f"layer {k} header")
        )
        try:
            activation = Activation(act_code)
        except ValueError:
            raise ModelFormatError(
                f"layer {k} has unknown activation code {act_code}", offset=header_offset + 8
            ) from None
        try:
            spec = LayerSpec(in_dim, out_dim, activation, float(drop), float(reg))
        except ValueError as exc:
            raise ModelFormatError(f"layer {k}: {exc}", offset=header_offset) from None
        w_bytes = reader.take(4 * in_dim * out_dim, f"layer {k} weights")
        b_bytes = reader.take(4 * out_dim, f"layer {k} biases")
        layers.append(spec)
        weights.append(
            np.frombuffer(w_bytes, dtype=_F32).astype(np.float64).reshape(in_dim, out_dim)
        )
        biases.append(np.frombuffer(b_bytes, dtype=_F32).astype(np.float64))

    if reader.pos != len(reader.data):
        raise ModelFormatError(
            f"trailing data: {len(reader.data) - reader.pos} unexpected bytes",
            offset=reader.pos,
        )
    try:
        return MlpModel(layers, weights, biases)
    except ValueError as exc:
        raise ModelFormatError(f"inconsistent model: {exc}", offset=_HEADER.size) from None
