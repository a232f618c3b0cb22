"""Synthetic COCO-style scenes for desk-scale experiments.

Classes come in quads. The background palette identifies the exact class;
the object's hue identifies only its quad, and the four quad members
differ in a fine zero-mean texture (checkerboard, horizontal or vertical
stripes at 2 px cells, or flat) painted on a canonical 32 px canvas.
Small objects are box-downsampled from that canvas, which averages every
texture to exactly zero: a small object is provably uninformative about
the quad member, while a large one shows its texture plainly. Context
therefore matters most for small objects - the dependence the trend
experiments probe. A fraction of *training* backgrounds is swapped for a
same-quad sibling's background; only the object texture can correct
those scenes, so the learner keeps pressure on the texture instead of
relying on the background shortcut alone.
"""

import colorsys
import json
import os
from dataclasses import dataclass, asdict

import numpy as np

from .images import save_png

CATEGORY_NAMES = (
    "alpha", "bravo", "charlie", "delta",
    "echo", "foxtrot", "golf", "hotel",
    "india", "juliett", "kilo", "lima",
)

QUAD = 4  # classes per object-hue group; one texture per member


@dataclass
class SyntheticConfig:
    classes: int = 8
    image_size: int = 64
    object_sizes: tuple = (8, 32)
    bg_noise: float = 26.0         # iid background pixel noise
    bg_blob_amp: float = 22.0      # low-frequency background modulation
    bg_mismatch_rate: float = 0.15  # training scenes with a sibling's bg
    obj_canvas: int = 32           # canonical object rendering size
    obj_cell: int = 2              # texture cell size on the canvas, px
    obj_pattern_amp: float = 50.0  # within-quad texture contrast
    obj_noise: float = 40.0        # iid object pixel noise

    def __post_init__(self):
        if self.classes % QUAD or self.classes < QUAD:
            raise ValueError(f"classes must be a multiple of {QUAD}")
        if self.classes > len(CATEGORY_NAMES):
            raise ValueError(f"at most {len(CATEGORY_NAMES)} classes")
        for size in self.object_sizes:
            if self.obj_canvas % size and size % self.obj_canvas:
                raise ValueError(
                    f"object size {size} incommensurate with the "
                    f"{self.obj_canvas} px canvas")

    @property
    def category_names(self):
        return list(CATEGORY_NAMES[:self.classes])


def _rgb(h, s, v):
    return np.array(colorsys.hsv_to_rgb(h % 1.0, s, v)) * 255.0


def _background(cfg, label, rng):
    base = _rgb(label / cfg.classes, 0.55, 0.55)
    n = cfg.image_size
    blobs = rng.standard_normal((4, 4, 3)) * cfg.bg_blob_amp
    blobs = np.repeat(np.repeat(blobs, n // 4, axis=0), n // 4, axis=1)
    noise = rng.standard_normal((n, n, 3)) * cfg.bg_noise
    return base[None, None, :] + blobs + noise


def _object_patch(cfg, label, size, rng):
    quad, member = divmod(label, QUAD)
    color = _rgb(quad / (cfg.classes / QUAD) + 1 / (2 * cfg.classes),
                 0.9, 0.82)
    canvas = cfg.obj_canvas
    cells = np.mgrid[0:canvas, 0:canvas] // cfg.obj_cell
    if member == 0:
        pattern = (cells[0] + cells[1]) % 2       # checkerboard
    elif member == 1:
        pattern = cells[0] % 2                    # horizontal stripes
    elif member == 2:
        pattern = cells[1] % 2                    # vertical stripes
    else:
        pattern = np.full((canvas, canvas), 0.5)  # flat
    patch = color[None, None, :] \
        + (pattern[:, :, None] * 2.0 - 1.0) * cfg.obj_pattern_amp
    patch += rng.standard_normal((canvas, canvas, 3)) * cfg.obj_noise
    if size == canvas:
        return patch
    if size < canvas:
        f = canvas // size
        return patch.reshape(size, f, size, f, 3).mean(axis=(1, 3))
    f = size // canvas
    return np.repeat(np.repeat(patch, f, axis=0), f, axis=1)


def render_scene(cfg, label, size, rng, bg_label=None):
    """One full-context scene; returns (uint8 image, bbox)."""
    n = cfg.image_size
    scene = _background(cfg, label if bg_label is None else bg_label, rng)
    margin = 2
    x = int(rng.integers(margin, n - size - margin + 1))
    y = int(rng.integers(margin, n - size - margin + 1))
    scene[y:y + size, x:x + size] = _object_patch(cfg, label, size, rng)
    return np.clip(np.rint(scene), 0, 255).astype(np.uint8), (x, y, size, size)


def build_synthetic_dataset(out_dir, n_images, cfg=None, seed=0,
                            mismatch=True):
    """Write a COCO-style dataset: images/ plus annotations.json.

    Classes and object sizes are balanced round-robin. With mismatch
    enabled, bg_mismatch_rate of the scenes draw their background from a
    random same-quad sibling (training-time pressure on the texture
    cue); pass mismatch=False for clean evaluation sets.
    """
    cfg = cfg or SyntheticConfig()
    rng = np.random.default_rng(seed)
    names = cfg.category_names
    image_dir = os.path.join(out_dir, "images")
    os.makedirs(image_dir, exist_ok=True)

    images, annotations = [], []
    for i in range(n_images):
        label = i % cfg.classes
        size = cfg.object_sizes[(i // cfg.classes) % len(cfg.object_sizes)]
        bg_label = None
        if mismatch and rng.random() < cfg.bg_mismatch_rate:
            quad = label - label % QUAD
            bg_label = int(quad + (label + rng.integers(1, QUAD)) % QUAD)
        scene, bbox = render_scene(cfg, label, size, rng, bg_label=bg_label)
        file_name = f"syn_{i:06d}.png"
        save_png(os.path.join(image_dir, file_name), scene)
        images.append({
            "id": i + 1, "file_name": file_name,
            "width": cfg.image_size, "height": cfg.image_size,
        })
        annotations.append({
            "id": i + 1, "image_id": i + 1, "category_id": label + 1,
            "bbox": [float(v) for v in bbox], "iscrowd": 0,
            "area": float(bbox[2] * bbox[3]),
        })

    doc = {
        "images": images,
        "annotations": annotations,
        "categories": [{"id": k + 1, "name": names[k]}
                       for k in range(cfg.classes)],
    }
    ann_path = os.path.join(out_dir, "annotations.json")
    with open(ann_path, "w") as f:
        json.dump(doc, f)
    with open(os.path.join(out_dir, "synthetic_config.json"), "w") as f:
        json.dump({"config": asdict(cfg), "seed": seed,
                   "n_images": n_images, "mismatch": mismatch},
                  f, indent=2, sort_keys=True)
        f.write("\n")
    return {"annotations": ann_path, "images": image_dir}
