"""Stimulus-to-stream preprocessing.

The context stream sees the whole stimulus resized to the model input
size with a white rectangle marking the target location; the object
stream sees the bbox region alone, resampled (non-uniformly for
non-square boxes) to the same input size.
"""

from dataclasses import dataclass

import numpy as np

from .. import kernels


@dataclass
class StreamInput:
    context: np.ndarray       # (in_channels, S, S), values in [0, 1]
    object_: np.ndarray       # (3, S, S) or None for single-stream configs
    location_mask: np.ndarray  # (S, S), 1 inside the rescaled bbox


def _scale_box(bbox, src_w, src_h, size):
    x, y, w, h = bbox
    x0 = int(round(x * size / src_w))
    y0 = int(round(y * size / src_h))
    x1 = max(x0 + 1, int(round((x + w) * size / src_w)))
    y1 = max(y0 + 1, int(round((y + h) * size / src_h)))
    return x0, y0, min(x1, size), min(y1, size)


def draw_cue_rectangle(img, box, width, gap, value=1.0):
    """White frame just outside `box` = (x0, y0, x1, y1); edits in place."""
    x0, y0, x1, y1 = box
    size_y, size_x = img.shape[:2]
    ox0, oy0 = x0 - gap - width, y0 - gap - width
    ox1, oy1 = x1 + gap + width, y1 + gap + width
    ix0, iy0, ix1, iy1 = x0 - gap, y0 - gap, x1 + gap, y1 + gap
    cols = np.zeros(size_x, dtype=bool)
    rows = np.zeros(size_y, dtype=bool)
    cols[max(ox0, 0):max(ox1, 0)] = True
    rows[max(oy0, 0):max(oy1, 0)] = True
    inner_c = np.zeros(size_x, dtype=bool)
    inner_r = np.zeros(size_y, dtype=bool)
    inner_c[max(ix0, 0):max(ix1, 0)] = True
    inner_r[max(iy0, 0):max(iy1, 0)] = True
    frame = np.outer(rows, cols) & ~np.outer(inner_r, inner_c)
    img[frame] = value
    return img


def preprocess_streams(image, bbox, config):
    """Build model stream inputs from one stimulus image and its bbox."""
    x, y, w, h = bbox
    ih, iw = image.shape[:2]
    if w <= 0 or h <= 0:
        raise ValueError(f"degenerate bbox {bbox}")
    if x < 0 or y < 0 or x + w > iw or y + h > ih:
        raise ValueError(f"bbox {bbox} outside image {iw}x{ih}")
    size = config.input_size
    dtype = np.dtype(config.dtype)

    src = image.astype(np.float64) / 255.0
    ctx = kernels.bilinear_resize(src, size, size)
    obj = kernels.bilinear_resize(
        np.ascontiguousarray(src[y:y + h, x:x + w]), size, size)

    box = _scale_box(bbox, iw, ih, size)
    draw_cue_rectangle(ctx, box, config.box_width, config.box_gap)

    mask = np.zeros((size, size), dtype=dtype)
    mask[box[1]:box[3], box[0]:box[2]] = 1.0

    ctx_chw = ctx.transpose(2, 0, 1).astype(dtype)
    if "binary_mask_input" in config.ablation:
        ctx_chw = np.concatenate([ctx_chw, mask[None]], axis=0)
        obj_chw = None
    else:
        obj_chw = obj.transpose(2, 0, 1).astype(dtype)
    return StreamInput(context=ctx_chw, object_=obj_chw, location_mask=mask)


def batch_streams(stream_inputs):
    """Stack StreamInputs into model-ready (B, C, S, S) arrays."""
    ctx = np.stack([s.context for s in stream_inputs])
    obj = None
    if stream_inputs[0].object_ is not None:
        obj = np.stack([s.object_ for s in stream_inputs])
    return ctx, obj
