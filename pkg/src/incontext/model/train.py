"""End-to-end training on full-context trials.

The optimizer and schedule below are repo defaults, not normative; the
model is always trained on full-context stimuli and evaluated on the
manipulated conditions without retraining.
"""

import os
from dataclasses import dataclass

import numpy as np

from ..stimuli.images import load_rgb
from .checkpoint import save_checkpoint
from .loss import batch_loss_and_grad
from .network import CATNet
from .streams import batch_streams, preprocess_streams


@dataclass
class TrainConfig:
    steps: int = 1500
    batch_size: int = 32
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    log_every: int = 100
    seed: int = 0


class Adam:
    def __init__(self, params, config):
        self.cfg = config
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params, grads):
        cfg = self.cfg
        self.t += 1
        bias1 = 1.0 - cfg.beta1 ** self.t
        bias2 = 1.0 - cfg.beta2 ** self.t
        for key, g in grads.items():
            m = self.m[key]
            v = self.v[key]
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * g
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * g * g
            params[key] -= cfg.lr * (m / bias1) / (
                np.sqrt(v / bias2) + cfg.eps)


@dataclass
class TrainingSet:
    ctx: np.ndarray          # (N, in_channels, S, S)
    obj: np.ndarray | None   # (N, 3, S, S) for two-stream models
    labels: np.ndarray       # (N,) int class indices
    categories: list         # index -> category name


class DivergenceError(RuntimeError):
    pass


def build_training_set(manifest, manifest_dir, model_config,
                       allow_any_condition=False):
    """Preprocess manifest trials into stacked stream arrays.

    Training data must be full-context stimuli; pass
    allow_any_condition=True only for diagnostic runs.
    """
    entries = list(manifest.entries)
    if not allow_any_condition:
        bad = [e.trial_id for e in entries if e.experiment != "A1_full"]
        if bad:
            raise ValueError(
                f"{len(bad)} non-full-context trials in training data "
                f"(e.g. {bad[0]}); condition variation is test-time only")
    categories = sorted({e.target.category for e in entries})
    cat_index = {c: i for i, c in enumerate(categories)}
    streams = []
    labels = []
    for entry in entries:
        img = load_rgb(os.path.join(manifest_dir, entry.assets["image"]))
        streams.append(preprocess_streams(img, entry.target.bbox,
                                          model_config))
        labels.append(cat_index[entry.target.category])
    ctx, obj = batch_streams(streams)
    return TrainingSet(ctx=ctx, obj=obj,
                       labels=np.asarray(labels, dtype=np.int64),
                       categories=categories)


def train(model, dataset, train_config, callback=None):
    """Adam training loop; returns the loss curve as [(step, loss), ...]."""
    rng = np.random.default_rng(train_config.seed)
    optimizer = Adam(model.params, train_config)
    n = dataset.labels.shape[0]
    curve = []
    for step in range(1, train_config.steps + 1):
        idx = rng.choice(n, size=min(train_config.batch_size, n),
                         replace=False)
        ctx = dataset.ctx[idx]
        obj = dataset.obj[idx] if dataset.obj is not None else None
        result = model.forward(ctx, obj, keep_cache=True)
        loss, dlogits = batch_loss_and_grad(result.logits,
                                            dataset.labels[idx])
        if not np.isfinite(loss):
            raise DivergenceError(
                f"loss became non-finite at step {step}; last finite "
                f"losses: {[l for _, l in curve[-5:]]}")
        grads = model.backward(result, dlogits)
        optimizer.step(model.params, grads)
        if step == 1 or step % train_config.log_every == 0 \
                or step == train_config.steps:
            curve.append((step, loss))
            if callback is not None:
                callback(step, loss)
    return curve


def train_to_checkpoint(manifest, manifest_dir, model_config, train_config,
                        out_path, callback=None):
    dataset = build_training_set(manifest, manifest_dir, model_config)
    if model_config.C != len(dataset.categories):
        raise ValueError(
            f"model C={model_config.C} but the training data has "
            f"{len(dataset.categories)} categories")
    model = CATNet(model_config)
    curve = train(model, dataset, train_config, callback=callback)
    save_checkpoint(out_path, model.params, model_config,
                    dataset.categories, curve)
    return model, dataset.categories, curve
