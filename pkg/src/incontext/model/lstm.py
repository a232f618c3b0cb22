"""Gated recurrent integration of the per-step gist vector.

Standard LSTM cell: input, forget, candidate and output gates computed
from the gist vector and the previous hidden state; memory c and hidden
state h evolve across the 25 ms steps.
"""

from dataclasses import dataclass

import numpy as np

from .layers import glorot, sigmoid


@dataclass
class RecurrentState:
    h: np.ndarray        # (B, n)
    c: np.ndarray        # (B, n)
    gates: dict | None = None   # i/f/o arrays for inspection


def init_lstm_params(config, rng):
    n = config.n
    dtype = np.dtype(config.dtype)
    params = {
        "lstm.W_x": glorot(rng, (4 * n, config.gist_dim), dtype),
        "lstm.W_h": glorot(rng, (4 * n, n), dtype),
        "lstm.b": np.zeros(4 * n, dtype=dtype),
    }
    params["lstm.b"][n:2 * n] = 1.0  # forget-gate bias: remember by default
    return params


def zero_state(batch, n, dtype):
    return RecurrentState(h=np.zeros((batch, n), dtype=dtype),
                          c=np.zeros((batch, n), dtype=dtype))


def lstm_step(x, state, W_x, W_h, b):
    """One recurrence step; x: (B, gist_dim). Returns (new_state, cache)."""
    n = state.h.shape[1]
    pre = x @ W_x.T + state.h @ W_h.T + b[None, :]
    i = sigmoid(pre[:, 0 * n:1 * n])
    f = sigmoid(pre[:, 1 * n:2 * n])
    g = np.tanh(pre[:, 2 * n:3 * n])
    o = sigmoid(pre[:, 3 * n:4 * n])
    c = f * state.c + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    new_state = RecurrentState(h=h, c=c, gates={"i": i, "f": f, "o": o})
    cache = (x, state.h, state.c, i, f, g, o, tanh_c)
    return new_state, cache


def lstm_step_backward(dh, dc, cache, W_x, W_h):
    """Backward through one step.

    dh, dc: gradients w.r.t. this step's h and c (dc carries the
    accumulated gradient flowing back along the memory chain).
    Returns (dx, dh_prev, dc_prev, grads).
    """
    x, h_prev, c_prev, i, f, g, o, tanh_c = cache
    dc_total = dc + dh * o * (1.0 - tanh_c * tanh_c)
    do = dh * tanh_c
    di = dc_total * g
    dg = dc_total * i
    df = dc_total * c_prev
    dc_prev = dc_total * f

    dpre = np.concatenate([
        di * i * (1.0 - i),
        df * f * (1.0 - f),
        dg * (1.0 - g * g),
        do * o * (1.0 - o),
    ], axis=1)

    dx = dpre @ W_x
    dh_prev = dpre @ W_h
    grads = {
        "W_x": dpre.T @ x,
        "W_h": dpre.T @ h_prev,
        "b": dpre.sum(axis=0),
    }
    return dx, dh_prev, dc_prev, grads
