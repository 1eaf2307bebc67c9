"""Newline-delimited JSON manifests of claim/document records.

Each line is one object with fields ``id``, ``claim_text``,
``document_text``, ``claim_image``, ``document_image`` and an optional
``category`` holding a verdict label (parsed case-insensitively).  Unknown
fields are ignored; missing text/image fields default to empty strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from mmentail.labels import FactifyLabel


class ManifestError(Exception):
    """Raised for malformed manifests; ``line`` is the 1-based line number."""

    def __init__(self, message: str, *, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class ManifestRecord:
    id: str
    claim_text: str = ""
    document_text: str = ""
    claim_image: str = ""
    document_image: str = ""
    category: FactifyLabel | None = None

    def to_json_dict(self) -> dict:
        out = {
            "id": self.id,
            "claim_text": self.claim_text,
            "document_text": self.document_text,
            "claim_image": self.claim_image,
            "document_image": self.document_image,
        }
        if self.category is not None:
            out["category"] = self.category.value
        return out


def load_manifest(path) -> list[ManifestRecord]:
    """Parse a manifest file, rejecting malformed lines and duplicate ids."""
    records: list[ManifestRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"malformed JSON ({exc.msg})", line=lineno) from None
            if not isinstance(obj, dict):
                raise ManifestError(f"expected an object, got {type(obj).__name__}", line=lineno)

            rid = obj.get("id")
            if not isinstance(rid, str) or not rid:
                raise ManifestError("missing or empty 'id'", line=lineno)
            if rid in seen:
                raise ManifestError(f"duplicate id {rid!r}", line=lineno)
            seen.add(rid)

            category = None
            if obj.get("category") is not None:
                try:
                    category = FactifyLabel.parse(str(obj["category"]))
                except ValueError as exc:
                    raise ManifestError(str(exc), line=lineno) from None

            records.append(
                ManifestRecord(
                    id=rid,
                    claim_text=str(obj.get("claim_text", "")),
                    document_text=str(obj.get("document_text", "")),
                    claim_image=str(obj.get("claim_image", "")),
                    document_image=str(obj.get("document_image", "")),
                    category=category,
                )
            )
    return records


def write_manifest(records, path) -> None:
    """Write records as one JSON object per line."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_json_dict()) + "\n")
