"""CLI surface: commands, outputs and exit codes (0 ok, 1 usage, 2 data)."""

import json

import pytest

from mmentail.cli import main
from mmentail.metrics import CLASS_NAMES
from mmentail.synthetic import generate_dataset


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Synthetic data, models trained via the CLI, plus predictions."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    paths = generate_dataset(data, n_records=30, seed=9, label_noise=0.15)
    config = root / "config.json"
    config.write_text(json.dumps({
        "optimizer": "sgd",
        "learning_rate": 1.0,
        "epochs": 4,
        "batch_size": 10,
        "seed": 3,
        "text_dropout": [0.3, 0.2],
    }))
    models = root / "models"
    code = main([
        "train",
        "--manifest", paths["manifest"],
        "--text-claims", paths["text_claims"],
        "--text-docs", paths["text_docs"],
        "--image-claims", paths["image_claims"],
        "--image-docs", paths["image_docs"],
        "--out", str(models),
        "--config", str(config),
    ])
    assert code == 0
    predictions = root / "preds.jsonl"
    code = main([
        "predict",
        "--manifest", paths["manifest"],
        "--models", str(models),
        "--heuristic", "prose-a",
        "--text-claims", paths["text_claims"],
        "--text-docs", paths["text_docs"],
        "--image-claims", paths["image_claims"],
        "--image-docs", paths["image_docs"],
        "--out", str(predictions),
    ])
    assert code == 0
    return {"root": root, "paths": paths, "models": models, "predictions": predictions}


def test_train_produces_model_files(workspace):
    assert (workspace["models"] / "text_entail.nnwt").exists()
    assert (workspace["models"] / "image_entail.nnwt").exists()


def test_predict_output_is_jsonl(workspace):
    lines = workspace["predictions"].read_text().splitlines()
    assert len(lines) == 30
    first = json.loads(lines[0])
    assert set(first) == {
        "id", "text_label", "image_label", "pair_valid",
        "final_label", "text_probs", "image_probs",
    }


def test_evaluate_writes_report_confusion_and_figure(workspace, capsys):
    root = workspace["root"]
    report = root / "report.json"
    confusion = root / "confusion.csv"
    figure = root / "confusion.png"
    code = main([
        "evaluate",
        "--predictions", str(workspace["predictions"]),
        "--manifest", workspace["paths"]["manifest"],
        "--report", str(report),
        "--confusion", str(confusion),
        "--figure", str(figure),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "weighted F1:" in out

    rep = json.loads(report.read_text())
    assert set(rep) == {"labels", "per_class", "weighted_f1", "confusion"}
    assert set(rep["per_class"]) == set(CLASS_NAMES)
    assert 0.0 <= rep["weighted_f1"] <= 1.0

    header = confusion.read_text().splitlines()[0]
    assert header == "gold\\pred," + ",".join(CLASS_NAMES)

    assert figure.exists()
    assert figure.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_inspect_evec(workspace, capsys):
    code = main(["inspect-evec", workspace["paths"]["text_claims"]])
    assert code == 0
    out = capsys.readouterr().out
    assert "dim: 384" in out
    assert "count: 30" in out
    assert "rec00000" in out


def test_usage_error_exits_1(capsys):
    assert main(["train", "--manifest", "m.jsonl"]) == 1  # missing required flags
    assert "usage error" in capsys.readouterr().err


def test_unknown_heuristic_is_usage_error(workspace, capsys):
    code = main([
        "predict",
        "--manifest", workspace["paths"]["manifest"],
        "--models", str(workspace["models"]),
        "--heuristic", "c",
        "--text-claims", workspace["paths"]["text_claims"],
        "--text-docs", workspace["paths"]["text_docs"],
        "--image-claims", workspace["paths"]["image_claims"],
        "--image-docs", workspace["paths"]["image_docs"],
        "--out", "/tmp/never.jsonl",
    ])
    assert code == 1


def test_missing_file_is_data_error(workspace, capsys):
    code = main(["inspect-evec", str(workspace["root"] / "absent.evec")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_corrupt_evec_is_data_error(workspace, capsys):
    bad = workspace["root"] / "bad.evec"
    bad.write_bytes(b"JUNKJUNKJUNKJUNKJUNK")
    assert main(["inspect-evec", str(bad)]) == 2
    assert "not an EVEC file" in capsys.readouterr().err


def test_evaluate_without_gold_is_data_error(workspace, tmp_path, capsys):
    manifest = tmp_path / "nogold.jsonl"
    lines = []
    for line in open(workspace["paths"]["manifest"], encoding="utf-8"):
        obj = json.loads(line)
        obj.pop("category", None)
        lines.append(json.dumps(obj))
    manifest.write_text("\n".join(lines) + "\n")
    code = main([
        "evaluate",
        "--predictions", str(workspace["predictions"]),
        "--manifest", str(manifest),
        "--report", str(tmp_path / "r.json"),
    ])
    assert code == 2
    assert "without a gold category" in capsys.readouterr().err


def test_bad_config_is_data_error(workspace, tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text('{"optimiser": "adam"}')
    paths = workspace["paths"]
    code = main([
        "train",
        "--manifest", paths["manifest"],
        "--text-claims", paths["text_claims"],
        "--text-docs", paths["text_docs"],
        "--image-claims", paths["image_claims"],
        "--image-docs", paths["image_docs"],
        "--out", str(tmp_path / "m"),
        "--config", str(config),
    ])
    assert code == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_seed_env_var_overrides_config(tmp_path, monkeypatch, capsys):
    out1 = tmp_path / "s1"
    out2 = tmp_path / "s2"
    monkeypatch.setenv("ENTAIL_SEED", "123")
    assert main(["make-synthetic", "--out", str(out1), "--records", "10", "--seed", "1"]) == 0
    monkeypatch.delenv("ENTAIL_SEED")
    assert main(["make-synthetic", "--out", str(out2), "--records", "10", "--seed", "123"]) == 0
    assert (out1 / "manifest.jsonl").read_bytes() == (out2 / "manifest.jsonl").read_bytes()
    assert (out1 / "text_claims.evec").read_bytes() == (out2 / "text_claims.evec").read_bytes()


def test_invalid_seed_env_var_is_usage_error(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ENTAIL_SEED", "not-a-number")
    assert main(["make-synthetic", "--out", str(tmp_path / "x"), "--records", "5"]) == 1
    assert "ENTAIL_SEED" in capsys.readouterr().err
