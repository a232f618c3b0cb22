#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy/scipy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the three hot kernels on training-shaped workloads plus one full
forward/backward step of the recognizer under each backend.
"""

import argparse
import time

import numpy as np

from incontext.kernels import _npkernels

try:
    from incontext.kernels import _cykernels
except ImportError:
    _cykernels = None

BACKENDS = {"numpy": _npkernels}
if _cykernels is not None:
    BACKENDS["cython"] = _cykernels


def timeit(fn, repeat):
    fn()  # warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((32, 16, 32, 32)).astype(np.float32)
    cols_shape = _npkernels.im2col(x, 3, 2, 1).shape
    g = rng.standard_normal(cols_shape).astype(np.float32)
    plane = rng.standard_normal((512, 640))
    kernel = np.exp(-np.linspace(-3, 3, 49) ** 2)
    kernel /= kernel.sum()
    img = rng.standard_normal((256, 256, 3))

    cases = [
        ("im2col 32x16x32x32 k3s2", lambda m: m.im2col(x, 3, 2, 1)),
        ("col2im (adjoint)", lambda m: m.col2im(g, x.shape, 3, 2, 1)),
        ("correlate1d 512x640 k49",
         lambda m: m.correlate1d_reflect(plane, kernel, 0)),
        ("bilinear 256->400",
         lambda m: m.bilinear_resize(img, 400, 400)),
    ]
    rows = []
    for name, fn in cases:
        row = {"case": name}
        for backend, module in BACKENDS.items():
            row[backend] = timeit(lambda: fn(module), repeat)
        rows.append(row)
    return rows


def bench_training_step(repeat):
    """One forward+backward of the recognizer per backend (subprocess-free:
    swaps the kernel functions in place)."""
    import incontext.kernels as K
    from incontext.model import CATNet, ModelConfig, batch_loss_and_grad

    config = ModelConfig(input_size=64, backbone_channels=(16, 24, 32),
                         n=64, C=8, T_m=4, dtype="float32", seed=0)
    rng = np.random.default_rng(1)
    ctx = rng.random((32, 3, 64, 64), dtype=np.float32)
    obj = rng.random((32, 3, 64, 64), dtype=np.float32)
    labels = rng.integers(0, 8, size=32)
    model = CATNet(config)

    def step():
        result = model.forward(ctx, obj, keep_cache=True)
        _, dlogits = batch_loss_and_grad(result.logits, labels)
        model.backward(result, dlogits)

    saved = (K.im2col, K.col2im)
    row = {"case": "catnet fwd+bwd B=32"}
    try:
        for backend, module in BACKENDS.items():
            K.im2col = module.im2col
            K.col2im = module.col2im
            row[backend] = timeit(step, repeat)
    finally:
        K.im2col, K.col2im = saved
    return [row]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rows = bench_kernels(args.repeat) + bench_training_step(args.repeat)
    names = list(BACKENDS)
    width = max(len(r["case"]) for r in rows) + 2
    header = "case".ljust(width) + "".join(n.rjust(12) for n in names)
    if len(names) == 2:
        header += "speedup".rjust(10)
    print(header)
    print("-" * len(header))
    for r in rows:
        line = r["case"].ljust(width)
        for n in names:
            line += f"{r[n] * 1e3:9.2f} ms"
        if len(names) == 2:
            line += f"{r[names[0]] / r[names[1]]:9.2f}x"
        print(line)
    if _cykernels is None:
        print("\n(extension not built; fallback only)")


if __name__ == "__main__":
    main()
