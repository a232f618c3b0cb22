"""Finite-difference validation of every analytic gradient."""

import numpy as np
import pytest

from incontext.model import CATNet, ModelConfig, batch_loss_and_grad


def toy_config(**overrides):
    kw = dict(input_size=8, backbone="toy", backbone_channels=(4, 3),
              n=4, C=3, T_m=2, dtype="float64", seed=7)
    kw.update(overrides)
    return ModelConfig(**kw)


def make_inputs(config, batch=2, seed=11):
    rng = np.random.default_rng(seed)
    s = config.input_size
    ctx = rng.random((batch, config.in_channels, s, s))
    obj = rng.random((batch, 3, s, s)) if config.two_stream else None
    labels = rng.integers(0, config.C, size=batch)
    return ctx, obj, labels


def loss_of(model, ctx, obj, labels, keep_cache=False):
    result = model.forward(ctx, obj, keep_cache=keep_cache)
    loss, dlogits = batch_loss_and_grad(result.logits, labels)
    return loss, result, dlogits


def group_relative_errors(config, n_checks=None, seed=11):
    """Analytic vs central-difference gradients, per parameter group.

    n_checks limits the number of probed entries per group (None checks
    every entry). Returns {param_name: relative_error}.
    """
    model = CATNet(config)
    ctx, obj, labels = make_inputs(config, seed=seed)
    _, result, dlogits = loss_of(model, ctx, obj, labels, keep_cache=True)
    analytic = model.backward(result, dlogits)

    h = 1e-6
    probe_rng = np.random.default_rng(0)
    errors = {}
    for name, param in model.params.items():
        flat = param.reshape(-1)
        if n_checks is None or n_checks >= flat.size:
            indices = np.arange(flat.size)
        else:
            indices = probe_rng.choice(flat.size, size=n_checks,
                                       replace=False)
        fd = np.zeros(indices.size)
        for k, idx in enumerate(indices):
            original = flat[idx]
            flat[idx] = original + h
            up, _, _ = loss_of(model, ctx, obj, labels)
            flat[idx] = original - h
            down, _, _ = loss_of(model, ctx, obj, labels)
            flat[idx] = original
            fd[k] = (up - down) / (2 * h)
        ana = analytic[name].reshape(-1)[indices]
        scale = max(np.linalg.norm(ana), np.linalg.norm(fd), 1e-12)
        errors[name] = np.linalg.norm(ana - fd) / scale
    return errors


def test_full_gradient_check_toy_catnet():
    errors = group_relative_errors(toy_config())
    # both attention parameter sets, the backbone, recurrence, and head
    groups = set(errors)
    assert {"attn.ctx.A_h", "attn.obj.A_h", "lstm.W_x", "head.L_h",
            "backbone.conv0.W"} <= groups
    for name, err in errors.items():
        assert err < 1e-4, f"{name}: relative error {err:.3e}"


@pytest.mark.parametrize("ablation", [
    ("single_stream",),
    ("binary_mask_input",),
    ("no_attention",),
    ("no_recurrence",),
    ("no_attention", "no_recurrence"),
])
def test_gradient_check_ablations(ablation):
    errors = group_relative_errors(toy_config(ablation=ablation), n_checks=6)
    for name, err in errors.items():
        assert err < 1e-4, f"{ablation} {name}: relative error {err:.3e}"


def test_gradients_reach_every_group():
    config = toy_config()
    model = CATNet(config)
    ctx, obj, labels = make_inputs(config)
    _, result, dlogits = loss_of(model, ctx, obj, labels, keep_cache=True)
    grads = model.backward(result, dlogits)
    assert set(grads) == set(model.params)
    for name, g in grads.items():
        assert np.abs(g).max() > 0, f"no gradient flow into {name}"
