"""Gated soft attention over one stream's feature map.

For locations i = 1..L with features a_i and previous hidden state h:

    e_i = A_h . h + A_a . a_i        alpha = softmax(e)
    beta = sigmoid(W_beta h)         gist z = sum_i beta_i alpha_i a_i

Each stream owns its own parameter set; the architecture is shared.
"""

from dataclasses import dataclass

import numpy as np

from .layers import glorot, sigmoid, softmax, softmax_backward


@dataclass
class AttentionState:
    alpha: np.ndarray   # (B, L), positive, rows sum to 1
    beta: np.ndarray    # (B, L), in (0, 1)
    gist: np.ndarray    # (B, D)


def init_attention_params(config, rng, stream):
    dtype = np.dtype(config.dtype)
    return {
        f"attn.{stream}.A_h": glorot(rng, (config.n,), dtype),
        f"attn.{stream}.A_a": glorot(rng, (config.D,), dtype),
        f"attn.{stream}.W_beta": glorot(rng, (config.L, config.n), dtype),
    }


def attend(a, h_prev, A_h, A_a, W_beta):
    """a: (B, L, D), h_prev: (B, n) -> (AttentionState, cache)."""
    e = (h_prev @ A_h)[:, None] + a @ A_a          # (B, L)
    alpha = softmax(e, axis=1)
    beta = sigmoid(h_prev @ W_beta.T)              # (B, L)
    weight = alpha * beta
    gist = np.einsum("bl,bld->bd", weight, a)
    state = AttentionState(alpha=alpha, beta=beta, gist=gist)
    cache = (a, h_prev, alpha, beta)
    return state, cache


def attend_backward(dgist, cache, A_h, A_a, W_beta):
    """Returns (da, dh_prev, param grads dict keyed A_h/A_a/W_beta)."""
    a, h_prev, alpha, beta = cache
    weight = alpha * beta
    dweight = np.einsum("bd,bld->bl", dgist, a)
    da = weight[:, :, None] * dgist[:, None, :]

    dalpha = dweight * beta
    dbeta = dweight * alpha

    de = softmax_backward(alpha, dalpha)
    de_sum = de.sum(axis=1)
    dh_prev = de_sum[:, None] * A_h[None, :]
    dA_h = de_sum @ h_prev
    da += de[:, :, None] * A_a[None, None, :]
    dA_a = np.einsum("bl,bld->d", de, a)

    dlogit = dbeta * beta * (1.0 - beta)
    dh_prev = dh_prev + dlogit @ W_beta
    dW_beta = np.einsum("bl,bn->ln", dlogit, h_prev)

    return da, dh_prev, {"A_h": dA_h, "A_a": dA_a, "W_beta": dW_beta}


def attend_uniform(a):
    """The no-attention ablation: alpha = 1/L and beta = 1 exactly."""
    batch, L, _ = a.shape
    alpha = np.full((batch, L), 1.0 / L, dtype=a.dtype)
    beta = np.ones((batch, L), dtype=a.dtype)
    gist = a.mean(axis=1)
    return AttentionState(alpha=alpha, beta=beta, gist=gist), L


def attend_uniform_backward(dgist, L):
    return np.repeat(dgist[:, None, :] / L, L, axis=1)
