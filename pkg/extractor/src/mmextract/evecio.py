"""EVEC writing (the wire format consumed by the mmentail pipeline).

Layout (little-endian): magic "EVEC", u16 version=1, u16 reserved=0,
u32 dim, u64 count, then per record u16 id byte length, UTF-8 id bytes,
dim f32 values.  Files are written to a temp path and renamed into place,
so a failed run leaves nothing behind.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

MAGIC = b"EVEC"
VERSION = 1

_HEADER = struct.Struct("<4sHHIQ")
_ID_LEN = struct.Struct("<H")


def write_evec(ids: list[str], vectors: np.ndarray, path) -> None:
    """Write aligned ids and (n, dim) vectors as an EVEC file, atomically."""
    matrix = np.asarray(vectors, dtype="<f4")
    if matrix.ndim != 2:
        raise ValueError(f"vectors must be 2-D, got shape {matrix.shape}")
    if len(ids) != matrix.shape[0]:
        raise ValueError(f"{len(ids)} ids but {matrix.shape[0]} vectors")
    if matrix.shape[1] == 0:
        raise ValueError("vector dim must be positive")
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate ids")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("vectors contain non-finite values")

    target = Path(path)
    temp = target.with_name(target.name + ".tmp")
    with open(temp, "wb") as handle:
        handle.write(_HEADER.pack(MAGIC, VERSION, 0, matrix.shape[1], matrix.shape[0]))
        for rid, row in zip(ids, matrix):
            encoded = rid.encode("utf-8")
            if not encoded or len(encoded) > 0xFFFF:
                raise ValueError(f"id {rid!r} must be 1..65535 UTF-8 bytes")
            handle.write(_ID_LEN.pack(len(encoded)))
            handle.write(encoded)
            handle.write(row.tobytes())
    os.replace(temp, target)
