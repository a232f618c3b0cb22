"""Elementary differentiable pieces with explicit backward passes.

Forward functions return (output, cache); backward functions take the
cache and the upstream gradient and return input/parameter gradients.
"""

import numpy as np

from .. import kernels


def sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x, axis=-1):
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def softmax_backward(alpha, dalpha):
    inner = (dalpha * alpha).sum(axis=-1, keepdims=True)
    return alpha * (dalpha - inner)


def conv2d_forward(x, W, b, stride, pad):
    """x: (B, Cin, H, W); W: (Cout, Cin, k, k); returns (B, Cout, OH, OW)."""
    batch, cin, h, w = x.shape
    cout, _, k, _ = W.shape
    oh = (h + 2 * pad - k) // stride + 1
    ow = (w + 2 * pad - k) // stride + 1
    cols = kernels.im2col(x, k, stride, pad)          # (B, Cin*k*k, OH*OW)
    wmat = W.reshape(cout, -1)
    out = np.matmul(wmat, cols) + b[None, :, None]
    cache = (cols, x.shape, W.shape, stride, pad)
    return out.reshape(batch, cout, oh, ow), cache


def conv2d_backward(dout, W, cache):
    cols, x_shape, w_shape, stride, pad = cache
    batch, cout = dout.shape[:2]
    dflat = dout.reshape(batch, cout, -1)
    wmat = W.reshape(cout, -1)
    dW = np.einsum("bco,bko->ck", dflat, cols).reshape(w_shape)
    db = dflat.sum(axis=(0, 2))
    dcols = np.matmul(wmat.T, dflat)
    dx = kernels.col2im(dcols, x_shape, w_shape[2], stride, pad)
    return dx, dW, db


def relu_forward(x):
    mask = x > 0
    return x * mask, mask


def relu_backward(dout, mask):
    return dout * mask


def glorot(rng, shape, dtype):
    fan_in = int(np.prod(shape[1:])) if len(shape) > 1 else shape[0]
    fan_out = shape[0]
    scale = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-scale, scale, size=shape).astype(dtype)


def he_normal(rng, shape, dtype):
    fan_in = int(np.prod(shape[1:]))
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(dtype)
