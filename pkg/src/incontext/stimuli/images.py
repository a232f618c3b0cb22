"""Lossless image file helpers shared by the generators.

Assets are 8-bit RGB PNG; lossy formats would break the bit-exactness
guarantees of the protected-region generators.
"""

import hashlib
import os

import numpy as np
from PIL import Image


def load_rgb(path):
    """Read an image file as (H, W, 3) uint8."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def save_png(path, arr):
    if arr.dtype != np.uint8 or arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError("expected (H, W, 3) uint8 array")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def quantize(arr):
    """Round a float image to uint8, clipping into [0, 255]."""
    return np.clip(np.rint(arr), 0, 255).astype(np.uint8)


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def stable_seed(*parts):
    """Derive a reproducible 128-bit seed from string/int parts."""
    h = hashlib.sha256("\x1f".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(h[:16], "big")
