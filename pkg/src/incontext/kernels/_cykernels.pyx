# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Same contracts as incontext.kernels._npkernels; selected at import when the
extension built successfully.
"""

import numpy as np

cimport numpy as cnp
cimport cython

cnp.import_array()

ctypedef fused floating:
    float
    double


cdef inline Py_ssize_t _reflect(Py_ssize_t i, Py_ssize_t n) nogil:
    # edge-repeating reflection, folds repeatedly: (d c b a | a b c d)
    cdef Py_ssize_t m
    if n == 1:
        return 0
    m = i % (2 * n)
    if m < 0:
        m += 2 * n
    if m >= n:
        m = 2 * n - 1 - m
    return m


def im2col(x, Py_ssize_t k, Py_ssize_t stride, Py_ssize_t pad):
    x = np.ascontiguousarray(x)
    if x.dtype not in (np.float64, np.float32):
        raise TypeError(f"unsupported dtype {x.dtype}")
    return _im2col(x, k, stride, pad)


def col2im(cols, x_shape, Py_ssize_t k, Py_ssize_t stride, Py_ssize_t pad):
    cols = np.ascontiguousarray(cols)
    b, c, h, w = x_shape
    if cols.dtype not in (np.float64, np.float32):
        raise TypeError(f"unsupported dtype {cols.dtype}")
    return _col2im(cols, b, c, h, w, k, stride, pad)


def correlate1d_reflect(plane, weights, int axis):
    plane = np.ascontiguousarray(plane)
    if plane.dtype not in (np.float64, np.float32):
        raise TypeError(f"unsupported dtype {plane.dtype}")
    weights = np.ascontiguousarray(weights, dtype=plane.dtype)
    return _correlate1d(plane, weights, axis)


def bilinear_resize(img, Py_ssize_t out_h, Py_ssize_t out_w):
    img = np.ascontiguousarray(img)
    if img.dtype not in (np.float64, np.float32):
        raise TypeError(f"unsupported dtype {img.dtype}")
    return _bilinear(img, out_h, out_w)


def _im2col(floating[:, :, :, ::1] x, Py_ssize_t k, Py_ssize_t stride,
            Py_ssize_t pad):
    cdef Py_ssize_t b = x.shape[0], c = x.shape[1]
    cdef Py_ssize_t h = x.shape[2], w = x.shape[3]
    cdef Py_ssize_t oh = (h + 2 * pad - k) // stride + 1
    cdef Py_ssize_t ow = (w + 2 * pad - k) // stride + 1
    if floating is double:
        dtype = np.float64
    else:
        dtype = np.float32
    out = np.zeros((b, c * k * k, oh * ow), dtype=dtype)
    cdef floating[:, :, ::1] cols = out
    cdef Py_ssize_t bi, ci, ki, kj, oi, oj, ii, jj, row
    with nogil:
        for bi in range(b):
            for ci in range(c):
                for ki in range(k):
                    for kj in range(k):
                        row = (ci * k + ki) * k + kj
                        for oi in range(oh):
                            ii = oi * stride - pad + ki
                            if ii < 0 or ii >= h:
                                continue
                            for oj in range(ow):
                                jj = oj * stride - pad + kj
                                if 0 <= jj < w:
                                    cols[bi, row, oi * ow + oj] = x[bi, ci, ii, jj]
    return out


def _col2im(floating[:, :, ::1] cols, Py_ssize_t b, Py_ssize_t c,
            Py_ssize_t h, Py_ssize_t w, Py_ssize_t k, Py_ssize_t stride,
            Py_ssize_t pad):
    cdef Py_ssize_t oh = (h + 2 * pad - k) // stride + 1
    cdef Py_ssize_t ow = (w + 2 * pad - k) // stride + 1
    if floating is double:
        dtype = np.float64
    else:
        dtype = np.float32
    out = np.zeros((b, c, h, w), dtype=dtype)
    cdef floating[:, :, :, ::1] x = out
    cdef Py_ssize_t bi, ci, ki, kj, oi, oj, ii, jj, row
    with nogil:
        for bi in range(b):
            for ci in range(c):
                for ki in range(k):
                    for kj in range(k):
                        row = (ci * k + ki) * k + kj
                        for oi in range(oh):
                            ii = oi * stride - pad + ki
                            if ii < 0 or ii >= h:
                                continue
                            for oj in range(ow):
                                jj = oj * stride - pad + kj
                                if 0 <= jj < w:
                                    x[bi, ci, ii, jj] += cols[bi, row, oi * ow + oj]
    return out


def _correlate1d(floating[:, ::1] plane, floating[::1] weights, int axis):
    cdef Py_ssize_t h = plane.shape[0], w = plane.shape[1]
    cdef Py_ssize_t m = weights.shape[0]
    cdef Py_ssize_t r = m // 2
    if floating is double:
        dtype = np.float64
    else:
        dtype = np.float32
    out = np.zeros((h, w), dtype=dtype)
    cdef floating[:, ::1] o = out
    cdef Py_ssize_t i, j, t, ri, lo, hi
    cdef floating acc, wt
    with nogil:
        if axis == 0:
            # accumulate whole source rows: the fold happens once per
            # (row, tap) and the inner loop streams contiguous memory
            for i in range(h):
                for t in range(m):
                    ri = _reflect(i + t - r, h)
                    wt = weights[t]
                    for j in range(w):
                        o[i, j] += wt * plane[ri, j]
        else:
            lo = r if r < w else w
            hi = w - r if w - r > lo else lo
            for i in range(h):
                for j in range(lo):
                    acc = 0
                    for t in range(m):
                        acc += weights[t] * plane[i, _reflect(j + t - r, w)]
                    o[i, j] = acc
                for j in range(lo, hi):   # interior: no boundary folds
                    acc = 0
                    for t in range(m):
                        acc += weights[t] * plane[i, j + t - r]
                    o[i, j] = acc
                for j in range(hi, w):
                    acc = 0
                    for t in range(m):
                        acc += weights[t] * plane[i, _reflect(j + t - r, w)]
                    o[i, j] = acc
    return out


def _bilinear(floating[:, :, ::1] img, Py_ssize_t out_h, Py_ssize_t out_w):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1], c = img.shape[2]
    if floating is double:
        dtype = np.float64
    else:
        dtype = np.float32
    out = np.empty((out_h, out_w, c), dtype=dtype)
    cdef floating[:, :, ::1] o = out
    cdef double sy = (<double> h) / out_h
    cdef double sx = (<double> w) / out_w
    cdef Py_ssize_t i, j, ci, y0, x0, y1, x1
    cdef double ys, xs, fy, fx, top, bot
    with nogil:
        for i in range(out_h):
            ys = (i + 0.5) * sy - 0.5
            if ys < 0:
                ys = 0
            if ys > h - 1:
                ys = h - 1
            y0 = <Py_ssize_t> ys
            y1 = y0 + 1
            if y1 > h - 1:
                y1 = h - 1
            fy = ys - y0
            for j in range(out_w):
                xs = (j + 0.5) * sx - 0.5
                if xs < 0:
                    xs = 0
                if xs > w - 1:
                    xs = w - 1
                x0 = <Py_ssize_t> xs
                x1 = x0 + 1
                if x1 > w - 1:
                    x1 = w - 1
                fx = xs - x0
                for ci in range(c):
                    top = img[y0, x0, ci] + (img[y0, x1, ci] - img[y0, x0, ci]) * fx
                    bot = img[y1, x0, ci] + (img[y1, x1, ci] - img[y1, x0, ci]) * fx
                    o[i, j, ci] = <floating> (top + (bot - top) * fy)
    return out
