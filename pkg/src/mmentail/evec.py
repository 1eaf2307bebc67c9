"""EVEC binary store: persisted embedding vectors keyed by record id.

Layout (all integers little-endian, floats IEEE-754 f32):

    magic "EVEC" | u16 version=1 | u16 reserved=0 | u32 dim | u64 count
    count records:
        u16 id_byte_length | id UTF-8 bytes | dim f32 values

Vectors are held in memory as float32 (the storage dtype), so
read(write(store)) reproduces the store exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"EVEC"
VERSION = 1

_HEADER = struct.Struct("<4sHHIQ")
_ID_LEN = struct.Struct("<H")
_F32 = np.dtype("<f4")


class EvecFormatError(Exception):
    """Raised for malformed EVEC data; ``offset`` is the failing byte position."""

    def __init__(self, message: str, *, offset: int = 0):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


@dataclass
class EvecStore:
    """A fixed-dimension embedding table, insertion-ordered by record id."""

    dim: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        converted = {}
        for rid, vec in self.entries.items():
            arr = np.asarray(vec, dtype=np.float32)
            if arr.shape != (self.dim,):
                raise ValueError(
                    f"vector for id {rid!r} has shape {arr.shape}, expected ({self.dim},)"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"vector for id {rid!r} contains non-finite values")
            converted[rid] = arr
        self.entries = converted

    def __len__(self) -> int:
        return len(self.entries)

    def ids(self) -> list[str]:
        return list(self.entries)

    def get(self, rid: str) -> np.ndarray:
        try:
            return self.entries[rid]
        except KeyError:
            raise KeyError(f"id {rid!r} not present in embedding store") from None


def write_evec(store: EvecStore, path) -> None:
    """Write a store to ``path`` in EVEC format."""
    chunks = [_HEADER.pack(MAGIC, VERSION, 0, store.dim, len(store.entries))]
    for rid, vec in store.entries.items():
        encoded = rid.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise ValueError(f"id {rid!r} exceeds 65535 UTF-8 bytes")
        chunks.append(_ID_LEN.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(np.ascontiguousarray(vec, dtype=_F32).tobytes())
    Path(path).write_bytes(b"".join(chunks))


def read_evec(path) -> EvecStore:
    """Read and validate an EVEC file."""
    data = Path(path).read_bytes()
    pos = 0

    def take(count: int, what: str) -> bytes:
        nonlocal pos
        if pos + count > len(data):
            raise EvecFormatError(
                f"truncated file: expected {count} bytes for {what}, "
                f"only {len(data) - pos} left",
                offset=pos,
            )
        out = data[pos : pos + count]
        pos += count
        return out

    magic, version, _reserved, dim, count = _HEADER.unpack(take(_HEADER.size, "file header"))
    if magic != MAGIC:
        raise EvecFormatError(f"not an EVEC file: bad magic {magic!r}", offset=0)
    if version != VERSION:
        raise EvecFormatError(f"unsupported EVEC version {version}", offset=4)
    if dim == 0:
        raise EvecFormatError("header dim is zero", offset=8)

    entries: dict[str, np.ndarray] = {}
    for k in range(count):
        record_offset = pos
        (id_len,) = _ID_LEN.unpack(take(_ID_LEN.size, f"record {k} id length"))
        try:
            rid = take(id_len, f"record {k} id").decode("utf-8")
        except UnicodeDecodeError:
            raise EvecFormatError(f"record {k} id is not valid UTF-8", offset=record_offset) from None
        if rid in entries:
            raise EvecFormatError(f"duplicate id {rid!r} in record {k}", offset=record_offset)
        vec = np.frombuffer(take(4 * dim, f"record {k} vector"), dtype=_F32)
        if not np.all(np.isfinite(vec)):
            raise EvecFormatError(
                f"record {k} (id {rid!r}) contains non-finite values", offset=record_offset
            )
        entries[rid] = vec.copy()

    if pos != len(data):
        raise EvecFormatError(
            f"count/size inconsistency: header count {count} consumed, "
            f"{len(data) - pos} trailing bytes remain",
            offset=pos,
        )
    return EvecStore(dim, entries)
