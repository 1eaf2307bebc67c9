"""Extraction CLI: turn manifest texts/images into EVEC embedding stores.

    extract text  --manifest M --field claim|document --out F.evec [--model SPEC]
    extract image --manifest M --field claim|document --out F.evec [--model SPEC] [--skip-bad]

Exit codes: 0 success, 1 usage error, 2 data error.  Relative image paths
are resolved against the manifest's directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from mmextract.encoders import (
    DEFAULT_IMAGE_MODEL,
    DEFAULT_TEXT_MODEL,
    EncoderUnavailableError,
    build_image_encoder,
    build_text_encoder,
)
from mmextract.evecio import write_evec
from mmextract.preprocess import ExtractError, preprocess_image, strip_urls


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def read_manifest(path) -> list[dict]:
    """Minimal reader for the newline-delimited JSON manifest format."""
    records = []
    seen = set()
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise ExtractError(f"cannot open manifest {path}: {exc}") from None
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ExtractError(f"manifest line {lineno}: malformed JSON ({exc.msg})") from None
            rid = obj.get("id")
            if not isinstance(rid, str) or not rid:
                raise ExtractError(f"manifest line {lineno}: missing or empty 'id'")
            if rid in seen:
                raise ExtractError(f"manifest line {lineno}: duplicate id {rid!r}")
            seen.add(rid)
            records.append(obj)
    return records


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="extract", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, default_model in (("text", DEFAULT_TEXT_MODEL), ("image", DEFAULT_IMAGE_MODEL)):
        cmd = sub.add_parser(mode, help=f"extract {mode} embeddings")
        cmd.add_argument("--manifest", required=True)
        cmd.add_argument("--field", required=True, choices=["claim", "document"])
        cmd.add_argument("--out", required=True, help="output EVEC path")
        cmd.add_argument("--model", default=default_model,
                         help=f"encoder backend (default: {default_model})")
        cmd.add_argument("--batch-size", type=int, default=32)
        cmd.add_argument("--skip-bad", action="store_true",
                         help="skip undecodable images instead of aborting")
    return parser


def _extract_text(args) -> None:
    records = read_manifest(args.manifest)
    encoder = build_text_encoder(args.model)
    key = "claim_text" if args.field == "claim" else "document_text"
    ids = [r["id"] for r in records]
    texts = [strip_urls(str(r.get(key, ""))) for r in records]
    vectors = encoder.encode(texts, batch_size=args.batch_size)
    write_evec(ids, vectors, args.out)
    print(f"wrote {len(ids)} vectors (dim {encoder.dim}) to {args.out}")


def _extract_image(args) -> None:
    records = read_manifest(args.manifest)
    encoder = build_image_encoder(args.model)
    key = "claim_image" if args.field == "claim" else "document_image"
    base = Path(args.manifest).parent

    ids, images, failures = [], [], []
    for record in records:
        raw_path = str(record.get(key, ""))
        path = Path(raw_path) if Path(raw_path).is_absolute() else base / raw_path
        try:
            images.append(preprocess_image(path))
            ids.append(record["id"])
        except ExtractError as exc:
            failures.append((record["id"], str(exc)))
    if failures and not args.skip_bad:
        detail = "; ".join(f"{rid}: {msg}" for rid, msg in failures)
        raise ExtractError(f"{len(failures)} image(s) failed to decode ({detail}); "
                           f"pass --skip-bad to skip them")
    if not ids:
        raise ExtractError("no decodable images; nothing to write")

    vectors = encoder.encode(images, batch_size=args.batch_size)
    write_evec(ids, vectors, args.out)
    print(f"wrote {len(ids)} vectors (dim {encoder.dim}) to {args.out}")
    if failures:
        print(f"skipped {len(failures)} record(s): " + ", ".join(rid for rid, _ in failures))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.mode == "text":
            _extract_text(args)
        else:
            _extract_image(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ExtractError, EncoderUnavailableError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
