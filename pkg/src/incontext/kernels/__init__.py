"""Numerical hot kernels with a compiled core and a pure-python fallback.

The compiled Cython backend is preferred when built; the numpy/scipy
fallback is selected automatically otherwise. Set INCONTEXT_KERNELS to
"cython" or "numpy" to force a backend (forcing "cython" raises if the
extension is missing).
"""

import os

_requested = os.environ.get("INCONTEXT_KERNELS", "").strip().lower()

if _requested == "numpy":
    from . import _npkernels as _impl
    BACKEND = "numpy"
elif _requested in ("", "cython"):
    try:
        from . import _cykernels as _impl
        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import _npkernels as _impl
        BACKEND = "numpy"
else:
    raise ValueError(
        f"INCONTEXT_KERNELS must be 'cython' or 'numpy', got {_requested!r}")

im2col = _impl.im2col
col2im = _impl.col2im
correlate1d_reflect = _impl.correlate1d_reflect
bilinear_resize = _impl.bilinear_resize

__all__ = ["BACKEND", "im2col", "col2im", "correlate1d_reflect",
           "bilinear_resize"]
