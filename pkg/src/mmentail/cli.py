"""Command-line interface.

Subcommands: ``train``, ``predict``, ``evaluate``, ``inspect-evec`` and
``make-synthetic``.  Exit codes: 0 on success, 1 on usage errors, 2 on
data or format errors.  The environment variable ``ENTAIL_SEED`` overrides
the configured training seed.
"""

from __future__ import annotations

import argparse
import os
import sys

from mmentail.evec import EvecFormatError, read_evec
from mmentail.labels import HEURISTICS
from mmentail.manifest import ManifestError, load_manifest
from mmentail.metrics import write_confusion_csv, write_report_json
from mmentail.model_io import ModelFormatError
from mmentail.pipeline import (
    PipelineConfig,
    PipelineError,
    evaluate_predictions,
    predict_pipeline,
    read_predictions,
    train_pipeline,
    write_predictions,
)

SEED_ENV_VAR = "ENTAIL_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map usage to 1
        raise UsageError(message)


def _add_evec_args(parser) -> None:
    parser.add_argument("--text-claims", required=True, help="text claim EVEC file")
    parser.add_argument("--text-docs", required=True, help="text document EVEC file")
    parser.add_argument("--image-claims", required=True, help="image claim EVEC file")
    parser.add_argument("--image-docs", required=True, help="image document EVEC file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mmentail", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train both sub-task models")
    train.add_argument("--manifest", required=True)
    _add_evec_args(train)
    train.add_argument("--out", required=True, help="output directory for model files")
    train.add_argument("--config", help="JSON config file (all keys optional)")

    predict = sub.add_parser("predict", help="predict verdicts for a manifest")
    predict.add_argument("--manifest", required=True)
    predict.add_argument("--models", required=True, help="directory holding trained models")
    predict.add_argument(
        "--heuristic",
        choices=sorted(HEURISTICS),
        default="prose-a",
        help="invalid-pair rewrite heuristic (default: prose-a)",
    )
    _add_evec_args(predict)
    predict.add_argument("--out", required=True, help="output predictions JSONL path")

    evaluate = sub.add_parser("evaluate", help="score predictions against gold labels")
    evaluate.add_argument("--predictions", required=True)
    evaluate.add_argument("--manifest", required=True)
    evaluate.add_argument("--report", required=True, help="output report JSON path")
    evaluate.add_argument("--confusion", help="optional confusion matrix CSV path")
    evaluate.add_argument("--figure", help="optional confusion matrix heatmap (png/pdf/svg)")

    inspect = sub.add_parser("inspect-evec", help="print an EVEC file's header and first ids")
    inspect.add_argument("path")

    synth = sub.add_parser("make-synthetic", help="generate a synthetic dataset for smoke runs")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--records", type=int, default=500)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--sample-seed", type=int, default=None)
    synth.add_argument("--label-noise", type=float, default=0.0)
    return parser


def _resolve_seed_override() -> int | None:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None


def _cmd_train(args) -> None:
    config = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    override = _resolve_seed_override()
    if override is not None:
        config.seed = override
    result = train_pipeline(
        args.manifest,
        args.text_claims,
        args.text_docs,
        args.image_claims,
        args.image_docs,
        args.out,
        config,
    )
    print(f"text model:  {result['text_model']} "
          f"(final epoch loss {result['text_history'][-1]:.6f})")
    print(f"image model: {result['image_model']} "
          f"(final epoch loss {result['image_history'][-1]:.6f})")


def _cmd_predict(args) -> None:
    predictions = predict_pipeline(
        args.manifest,
        args.text_claims,
        args.text_docs,
        args.image_claims,
        args.image_docs,
        args.models,
        args.heuristic,
    )
    write_predictions(predictions, args.out)
    invalid = sum(1 for p in predictions if not p.pair_valid)
    print(f"wrote {len(predictions)} predictions to {args.out} "
          f"({invalid} invalid pairs rewritten by '{args.heuristic}')")


def _cmd_evaluate(args) -> None:
    predictions = read_predictions(args.predictions)
    records = load_manifest(args.manifest)
    counts, rep = evaluate_predictions(predictions, records)
    write_report_json(rep, args.report)
    print(f"weighted F1: {rep['weighted_f1']:.6f} over {len(predictions)} predictions")
    print(f"report: {args.report}")
    if args.confusion:
        write_confusion_csv(counts, args.confusion)
        print(f"confusion: {args.confusion}")
    if args.figure:
        from mmentail.plots import render_confusion

        render_confusion(counts, args.figure, title="Confusion matrix")
        print(f"figure: {args.figure}")


def _cmd_inspect_evec(args) -> None:
    store = read_evec(args.path)
    ids = store.ids()
    shown = ", ".join(ids[:5])
    if len(ids) > 5:
        shown += ", ..."
    print(f"path: {args.path}")
    print(f"dim: {store.dim}")
    print(f"count: {len(store)}")
    print(f"ids: {shown}")


def _cmd_make_synthetic(args) -> None:
    from mmentail.synthetic import generate_dataset

    seed = args.seed
    override = _resolve_seed_override()
    if override is not None:
        seed = override
    paths = generate_dataset(
        args.out,
        args.records,
        seed=seed,
        sample_seed=args.sample_seed,
        label_noise=args.label_noise,
    )
    for key, value in paths.items():
        print(f"{key}: {value}")


_COMMANDS = {
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "inspect-evec": _cmd_inspect_evec,
    "make-synthetic": _cmd_make_synthetic,
}

_DATA_ERRORS = (
    PipelineError,
    ManifestError,
    EvecFormatError,
    ModelFormatError,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
