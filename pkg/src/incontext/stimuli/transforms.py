"""Stimulus image generators.

Every generator is pure given (pixels, bbox, parameters, rng) and keeps
its protected region bit-exact with the source. Images are (H, W, 3)
uint8; bboxes are (x, y, w, h) in pixel coordinates.
"""

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from .images import quantize

MID_GRAY = (128, 128, 128)


def _check_bbox(image, bbox):
    x, y, w, h = bbox
    ih, iw = image.shape[:2]
    if w <= 0 or h <= 0:
        raise ValueError(f"degenerate bbox {bbox}")
    if x < 0 or y < 0 or x + w > iw or y + h > ih:
        raise ValueError(f"bbox {bbox} outside image {iw}x{ih}")


def bbox_mask(shape, bbox):
    """Boolean (H, W) mask, True inside the bbox."""
    x, y, w, h = bbox
    mask = np.zeros(shape[:2], dtype=bool)
    mask[y:y + h, x:x + w] = True
    return mask


def gen_minimal_context(image, bbox, background=MID_GRAY):
    """Keep only the bbox pixels; fill the surround with a uniform value."""
    _check_bbox(image, bbox)
    x, y, w, h = bbox
    out = np.empty_like(image)
    out[:] = np.asarray(background, dtype=np.uint8)
    out[y:y + h, x:x + w] = image[y:y + h, x:x + w]
    return out


@dataclass
class CoCrop:
    image: np.ndarray
    window: tuple            # (x, y, w, h) of the crop in source coords
    achieved_ratio: float
    clamped: bool
    feasible: bool


def _co_window_size(bw, bh, co_ratio):
    """Integer window size approximating area (co+1)*bbox_area.

    The base window scales both sides by sqrt(co+1); integer rounding is
    then corrected by searching nearby widths (height follows from the
    area target) for the best achieved ratio, preferring near-isotropic
    shapes among candidates within 0.5% of the requested ratio.
    """
    if co_ratio == 0:
        return bw, bh
    area = bw * bh
    target = (co_ratio + 1) * area
    scale = math.sqrt(co_ratio + 1.0)
    lo = max(bw, int(math.floor(bw * scale)) - 25)
    hi = int(math.ceil(bw * scale)) + 25
    best = None
    for w in range(lo, hi + 1):
        for h in (max(bh, target // w), max(bh, -(-target // w))):
            h = int(h)
            err = abs((w * h - area) / area - co_ratio) / co_ratio
            aniso = abs(math.log((w / bw) / (h / bh)))
            cand = (err > 0.005, err if err > 0.005 else aniso, w, h)
            if best is None or cand[:2] < best[:2]:
                best = cand
    return best[2], best[3]


def gen_co_crop(image, bbox, co_ratio):
    """Crop a window around the bbox hitting a context-object area ratio.

    The window is centered on the bbox, shifted to fit the image, and
    clamped when larger than the image; the achieved ratio is recorded.
    Entries that cannot reach the requested ratio are marked infeasible.
    """
    _check_bbox(image, bbox)
    ih, iw = image.shape[:2]
    x, y, bw, bh = bbox
    ww, wh = _co_window_size(bw, bh, co_ratio)

    clamped = False
    if ww > iw:
        ww, clamped = iw, True
    if wh > ih:
        wh, clamped = ih, True
    x0 = int(round(x + bw / 2 - ww / 2))
    y0 = int(round(y + bh / 2 - wh / 2))
    x0 = min(max(x0, 0), iw - ww)
    y0 = min(max(y0, 0), ih - wh)

    achieved = (ww * wh - bw * bh) / (bw * bh)
    if co_ratio == 0:
        feasible = ww == bw and wh == bh
    else:
        feasible = achieved >= co_ratio * 0.98
    crop = np.ascontiguousarray(image[y0:y0 + wh, x0:x0 + ww])
    return CoCrop(image=crop, window=(x0, y0, ww, wh),
                  achieved_ratio=achieved, clamped=clamped, feasible=feasible)


def gaussian_kernel(sigma):
    """Normalized 1-D Gaussian, truncated at radius ceil(3*sigma)."""
    radius = math.ceil(3 * sigma)
    j = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(j * j) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur_float(image, sigma):
    """Separable Gaussian blur in float64, reflective boundaries."""
    k = gaussian_kernel(sigma)
    src = image.astype(np.float64)
    out = np.empty_like(src)
    for c in range(src.shape[2]):
        plane = kernels.correlate1d_reflect(src[:, :, c], k, 0)
        out[:, :, c] = kernels.correlate1d_reflect(plane, k, 1)
    return out


def gaussian_blur(image, sigma):
    """Gaussian blur of a uint8 image, quantized back to uint8."""
    return quantize(gaussian_blur_float(image, sigma))


def gen_blur(image, bbox, sigma, region):
    """Blur either the surround ("context") or the bbox ("object").

    The whole frame is blurred once and the protected region is restored
    bit-exact from the source.
    """
    _check_bbox(image, bbox)
    if region not in ("context", "object"):
        raise ValueError(f"region must be context or object, got {region!r}")
    blurred = gaussian_blur(image, sigma)
    x, y, w, h = bbox
    out = blurred.copy()
    if region == "context":
        out[y:y + h, x:x + w] = image[y:y + h, x:x + w]
    else:
        out[:] = image
        out[y:y + h, x:x + w] = blurred[y:y + h, x:x + w]
    return out


def phase_scramble(image, rng):
    """Randomize the phase spectrum per channel, keeping amplitudes.

    One random phase field (drawn once from `rng`) is added to every
    channel so cross-channel structure degrades coherently. The field is
    the phase of a white-noise FFT, which keeps the spectrum Hermitian,
    and the DC term is left untouched so mean luminance is preserved.
    Returns float64 pixels, unquantized.
    """
    src = image.astype(np.float64)
    h, w = src.shape[:2]
    noise = rng.standard_normal((h, w))
    phase = np.angle(np.fft.fft2(noise))
    phase[0, 0] = 0.0
    shift = np.exp(1j * phase)
    out = np.empty_like(src)
    for c in range(src.shape[2]):
        spectrum = np.fft.fft2(src[:, :, c]) * shift
        out[:, :, c] = np.fft.ifft2(spectrum).real
    return out


def gen_texture_context(image, bbox, rng):
    """Replace the surround with a phase-scrambled version of the scene.

    The object pixels are pasted back bit-exact at their original
    location after scrambling.
    """
    _check_bbox(image, bbox)
    out = quantize(phase_scramble(image, rng))
    x, y, w, h = bbox
    out[y:y + h, x:x + w] = image[y:y + h, x:x + w]
    return out


def jigsaw_edges(size, pieces):
    """Cut points along one axis; the last piece absorbs the remainder."""
    base = size // pieces
    edges = [i * base for i in range(pieces)] + [size]
    return edges


def gen_jigsaw(image, bbox, grid, rng):
    """Scramble equal grid pieces, keeping the target piece in place.

    Pieces only swap with same-shape pieces (remainder pieces permute
    among themselves). Returns None when the bbox spans more than one
    piece, mirroring the rejected trials of the grid experiments.
    """
    _check_bbox(image, bbox)
    g = int(grid.split("x")[0])
    if grid != f"{g}x{g}":
        raise ValueError(f"grid must look like NxN, got {grid!r}")
    ih, iw = image.shape[:2]
    rows = jigsaw_edges(ih, g)
    cols = jigsaw_edges(iw, g)

    x, y, w, h = bbox
    pi = min(np.searchsorted(rows, y, side="right") - 1, g - 1)
    pj = min(np.searchsorted(cols, x, side="right") - 1, g - 1)
    if (y + h > rows[pi + 1] or x + w > cols[pj + 1]
            or y < rows[pi] or x < cols[pj]):
        return None  # object occupies more than one piece

    slots = [(i, j) for i in range(g) for j in range(g) if (i, j) != (pi, pj)]
    by_shape = {}
    for (i, j) in slots:
        shape = (rows[i + 1] - rows[i], cols[j + 1] - cols[j])
        by_shape.setdefault(shape, []).append((i, j))

    out = image.copy()
    for shape in sorted(by_shape):
        group = by_shape[shape]
        perm = rng.permutation(len(group))
        for dst_idx, src_idx in enumerate(perm):
            di, dj = group[dst_idx]
            si, sj = group[src_idx]
            out[rows[di]:rows[di + 1], cols[dj]:cols[dj + 1]] = \
                image[rows[si]:rows[si + 1], cols[sj]:cols[sj + 1]]
    return out


@dataclass
class CongruencePaste:
    image: np.ndarray
    donor: object  # TargetAnnotation of the donor image


def eligible_donors(target, donor_pool, congruence):
    """Donor images for a paste, judged by their full annotation sets.

    Congruent donors contain at least one instance of the target
    category; incongruent donors contain none. The donor must be a
    different image and large enough to hold the bbox at its original
    coordinates.
    """
    x, y, w, h = target.bbox
    by_image = {}
    for ann in donor_pool:
        by_image.setdefault(ann.image_id, []).append(ann)
    out = []
    for image_id in sorted(by_image):
        if image_id == target.image_id:
            continue
        anns = by_image[image_id]
        has_category = any(a.category == target.category for a in anns)
        if congruence == "congruent" and not has_category:
            continue
        if congruence == "incongruent" and has_category:
            continue
        iw, ih = anns[0].image_size
        if x + w > iw or y + h > ih:
            continue
        out.append(anns[0])
    return out


def gen_congruence_paste(target, donor_pool, congruence, rng, load_image,
                         target_image=None):
    """Paste the object into a donor scene at the same pixel coordinates.

    Returns None when no eligible donor exists (the entry is flagged and
    skipped upstream).
    """
    donors = eligible_donors(target, donor_pool, congruence)
    if not donors:
        return None
    donor = donors[int(rng.integers(len(donors)))]
    donor_img = load_image(donor)
    if target_image is None:
        target_image = load_image(target)
    x, y, w, h = target.bbox
    out = donor_img.copy()
    out[y:y + h, x:x + w] = target_image[y:y + h, x:x + w]
    return CongruencePaste(image=out, donor=donor)
