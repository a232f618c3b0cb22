"""End-to-end pipeline through the CLI surface."""

import csv
import json
import os

import pytest

from incontext.cli import main


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    data = str(root / "data")
    main(["synth", "--out", data, "--images", "40", "--classes", "4",
          "--image-size", "32", "--sizes", "8,16", "--seed", "11"])
    train_dir = str(root / "train_manifest")
    main(["generate", "--annotations", os.path.join(data, "annotations.json"),
          "--images", os.path.join(data, "images"), "--out", train_dir,
          "--experiments", "A1_full", "--sizes", "all", "--seed", "1"])
    test_dir = str(root / "test_manifest")
    main(["generate", "--annotations", os.path.join(data, "annotations.json"),
          "--images", os.path.join(data, "images"), "--out", test_dir,
          "--experiments", "A1,B5", "--sizes", "all", "--seed", "2"])
    return root, data, train_dir, test_dir


def test_generate_writes_expected_layout(pipeline):
    _, _, train_dir, test_dir = pipeline
    assert os.path.exists(os.path.join(train_dir, "manifest.jsonl"))
    assert os.path.exists(os.path.join(train_dir, "generator_config.json"))
    with open(os.path.join(test_dir, "manifest.jsonl")) as f:
        experiments = {json.loads(line)["experiment"] for line in f}
    assert experiments == {"A1_full", "A1_minimal", "B5_congruence"}


def test_train_eval_report_chain(pipeline, tmp_path, capsys):
    root, _, train_dir, test_dir = pipeline
    config_path = str(tmp_path / "config.json")
    with open(config_path, "w") as f:
        json.dump({"model": {"input_size": 32,
                             "backbone_channels": [6, 8, 10],
                             "n": 16, "T_m": 2, "dtype": "float32"},
                   "train": {"steps": 8, "batch_size": 8}}, f)
    ckpt = str(tmp_path / "model.npz")
    main(["train", "--data", train_dir, "--config", config_path,
          "--out", ckpt])
    assert os.path.exists(ckpt)

    results = str(tmp_path / "results.csv")
    main(["eval", "--ckpt", ckpt, "--manifest", test_dir, "--out", results])
    with open(results, newline="") as f:
        rows = list(csv.DictReader(f))
    assert rows and {r["experiment"] for r in rows} == {
        "A1_full", "A1_minimal", "B5_congruence"}

    report_dir = str(tmp_path / "report")
    main(["report", "--model-results", results, "--out", report_dir])
    assert os.path.exists(os.path.join(report_dir, "model_report.csv"))
    assert os.path.exists(os.path.join(report_dir, "summary.csv"))
    out = capsys.readouterr().out
    assert "accuracy (model)" in out


def test_keygen_covers_manifest(pipeline, tmp_path):
    _, _, _, test_dir = pipeline
    key_path = str(tmp_path / "key.json")
    main(["keygen", "--manifest", test_dir, "--out", key_path])
    with open(key_path) as f:
        key = json.load(f)
    with open(os.path.join(test_dir, "manifest.jsonl")) as f:
        n_trials = sum(1 for line in f if line.strip())
    assert len(key) == n_trials


def test_generate_balanced_selection(pipeline, tmp_path):
    _, data, _, _ = pipeline
    out = str(tmp_path / "balanced")
    # the 16 px synthetic objects fall in the S1 bin (extent 16)
    main(["generate", "--annotations", os.path.join(data, "annotations.json"),
          "--images", os.path.join(data, "images"), "--out", out,
          "--experiments", "A1_full", "--sizes", "S1", "--per-cell", "2",
          "--seed", "9"])
    with open(os.path.join(out, "manifest.jsonl")) as f:
        entries = [json.loads(line) for line in f if line.strip()]
    counts = {}
    for e in entries:
        key = (e["target"]["category"], e["target"]["size_bin"])
        counts[key] = counts.get(key, 0) + 1
    assert len(entries) == 8  # 4 categories x 1 bin x 2 per cell
    assert set(counts.values()) == {2}
    assert all(k[1] == "S1" for k in counts)


def test_eval_accepts_manifest_jsonl_path(pipeline, tmp_path):
    root, _, train_dir, test_dir = pipeline
    config_path = str(tmp_path / "c.json")
    with open(config_path, "w") as f:
        json.dump({"model": {"input_size": 32,
                             "backbone_channels": [6, 8, 10],
                             "n": 8, "T_m": 1, "dtype": "float32"},
                   "train": {"steps": 2, "batch_size": 4}}, f)
    ckpt = str(tmp_path / "m.npz")
    main(["train", "--data", os.path.join(train_dir, "manifest.jsonl"),
          "--config", config_path, "--out", ckpt])
    results = str(tmp_path / "r.csv")
    main(["eval", "--ckpt", ckpt,
          "--manifest", os.path.join(test_dir, "manifest.jsonl"),
          "--out", results])
    assert os.path.getsize(results) > 0
