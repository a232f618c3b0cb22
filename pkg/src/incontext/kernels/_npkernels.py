"""Pure numpy/scipy implementations of the hot kernels.

This is the fallback backend used when the compiled extension is not
available. Both backends implement the same contracts and are compared
in tests and in benchmarks/bench_kernels.py.
"""

import numpy as np
from scipy import ndimage


def im2col(x, k, stride, pad):
    """Unfold (B, C, H, W) into column matrix (B, C*k*k, OH*OW).

    Zero padding of `pad` pixels on each side, square kernel, square stride.
    """
    b, c, h, w = x.shape
    oh = (h + 2 * pad - k) // stride + 1
    ow = (w + 2 * pad - k) // stride + 1
    if pad:
        xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    else:
        xp = x
    cols = np.empty((b, c, k, k, oh, ow), dtype=x.dtype)
    for ki in range(k):
        for kj in range(k):
            cols[:, :, ki, kj] = xp[:, :, ki:ki + stride * oh:stride,
                                    kj:kj + stride * ow:stride]
    return cols.reshape(b, c * k * k, oh * ow)


def col2im(cols, x_shape, k, stride, pad):
    """Adjoint of im2col: scatter-add columns back to (B, C, H, W)."""
    b, c, h, w = x_shape
    oh = (h + 2 * pad - k) // stride + 1
    ow = (w + 2 * pad - k) // stride + 1
    cols = cols.reshape(b, c, k, k, oh, ow)
    xp = np.zeros((b, c, h + 2 * pad, w + 2 * pad), dtype=cols.dtype)
    for ki in range(k):
        for kj in range(k):
            xp[:, :, ki:ki + stride * oh:stride,
               kj:kj + stride * ow:stride] += cols[:, :, ki, kj]
    if pad:
        return np.ascontiguousarray(xp[:, :, pad:pad + h, pad:pad + w])
    return xp


def correlate1d_reflect(plane, weights, axis):
    """Correlate a 2-D plane with a 1-D kernel along `axis`.

    Boundary handling is edge-repeating reflection: (d c b a | a b c d),
    folding as many times as the kernel overhangs.
    """
    return ndimage.correlate1d(plane, weights, axis=axis, mode="reflect")


def bilinear_resize(img, out_h, out_w):
    """Resize (H, W, C) float image with bilinear sampling.

    Half-pixel-center convention: src = (dst + 0.5) * scale - 0.5, clamped
    to the source extent, so equal sizes reproduce the input exactly.
    """
    h, w = img.shape[:2]
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w) - 0.5
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None, None]
    fx = (xs - x0)[None, :, None]
    tl = img[y0[:, None], x0[None, :]]
    tr = img[y0[:, None], x1[None, :]]
    bl = img[y1[:, None], x0[None, :]]
    br = img[y1[:, None], x1[None, :]]
    top = tl + (tr - tl) * fx
    bot = bl + (br - bl) * fx
    out = top + (bot - top) * fy
    return out.astype(img.dtype, copy=False)
