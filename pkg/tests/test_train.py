import os

import numpy as np
import pytest

from incontext.model import (CATNet, DivergenceError, ModelConfig,
                             TrainConfig, build_training_set, load_checkpoint,
                             train, train_to_checkpoint)
from incontext.stimuli import (StimulusCondition, TimingConfig,
                               compose_trial_manifest, ingest_annotations)
from incontext.stimuli.images import load_rgb
from incontext.stimuli.synthetic import SyntheticConfig, build_synthetic_dataset


@pytest.fixture(scope="module")
def tiny_manifest(tmp_path_factory):
    root = tmp_path_factory.mktemp("train_data")
    paths = build_synthetic_dataset(
        str(root), n_images=48,
        cfg=SyntheticConfig(classes=4, image_size=32, object_sizes=(8, 16)),
        seed=9)
    result = ingest_annotations(paths["annotations"], paths["images"])
    out = str(root / "manifest")
    loader = lambda t: load_rgb(os.path.join(paths["images"], t.file_name))
    manifest = compose_trial_manifest(
        result.targets, [StimulusCondition("A1_full")], TimingConfig(), out,
        loader)
    return manifest, out


def tiny_model_config(**kw):
    base = dict(input_size=32, backbone_channels=(8, 10, 12), n=24, C=4,
                T_m=3, dtype="float32", seed=0)
    base.update(kw)
    return ModelConfig(**base)


def test_loss_falls_during_training(tiny_manifest):
    manifest, mdir = tiny_manifest
    config = tiny_model_config()
    dataset = build_training_set(manifest, mdir, config)
    assert dataset.categories == ["alpha", "bravo", "charlie", "delta"]
    model = CATNet(config)
    curve = train(model, dataset,
                  TrainConfig(steps=150, batch_size=16, log_every=10, seed=1))
    first = curve[0][1]
    last = np.mean([l for _, l in curve[-3:]])
    assert last < first * 0.6, (first, last)


def test_training_rejects_condition_variation(tiny_manifest, tmp_path):
    import dataclasses
    manifest, mdir = tiny_manifest
    evil = dataclasses.replace(manifest.entries[0], experiment="A1_minimal")
    manifest_bad = dataclasses.replace(manifest,
                                       entries=[evil] + manifest.entries[1:])
    with pytest.raises(ValueError, match="full-context"):
        build_training_set(manifest_bad, mdir, tiny_model_config())


def test_divergence_aborts_with_diagnostic(tiny_manifest):
    manifest, mdir = tiny_manifest
    config = tiny_model_config()
    dataset = build_training_set(manifest, mdir, config)
    dataset.ctx[:, 0, 0, 0] = np.nan
    with pytest.raises(DivergenceError):
        train(CATNet(config), dataset, TrainConfig(steps=5, batch_size=48))


def test_checkpoint_roundtrip_from_training(tiny_manifest, tmp_path):
    manifest, mdir = tiny_manifest
    config = tiny_model_config()
    path = str(tmp_path / "ckpt.npz")
    model, categories, curve = train_to_checkpoint(
        manifest, mdir, config, TrainConfig(steps=5, batch_size=8), path)
    params, config2, categories2, curve2 = load_checkpoint(path)
    assert categories2 == categories
    assert config2 == config
    for key, value in model.params.items():
        np.testing.assert_array_equal(params[key], value)


def test_single_stream_checkpoint_lacks_object_attention(tiny_manifest,
                                                         tmp_path):
    manifest, mdir = tiny_manifest
    config = tiny_model_config(ablation=("single_stream",))
    path = str(tmp_path / "ss.npz")
    train_to_checkpoint(manifest, mdir, config,
                        TrainConfig(steps=2, batch_size=8), path)
    params, _, _, _ = load_checkpoint(path)
    assert any(k.startswith("attn.ctx.") for k in params)
    assert not any(k.startswith("attn.obj.") for k in params)
