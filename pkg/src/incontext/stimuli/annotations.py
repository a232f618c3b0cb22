"""Ingestion of COCO-style instance annotations into target records.

Each (image, object) pair becomes one TargetAnnotation with an integer
bbox, an extent value, and a size bin. Per-entry problems (missing image
file, bbox outside bounds, unknown category) become error records; only a
malformed annotation file is fatal.
"""

import json
import math
import os
from dataclasses import dataclass, field

# Inclusive extent ranges; anything outside falls in UNBINNED.
SIZE_BINS = {
    "S1": (16.0, 32.0),
    "S2": (56.0, 72.0),
    "S4": (112.0, 144.0),
    "S8": (224.0, 288.0),
}
UNBINNED = "unbinned"

EXTENT_METRICS = ("geomean", "long_side", "short_side")


class AnnotationFormatError(Exception):
    """The annotation file itself cannot be parsed."""


def compute_extent(w, h, metric="geomean"):
    if metric == "geomean":
        return math.sqrt(w * h)
    if metric == "long_side":
        return float(max(w, h))
    if metric == "short_side":
        return float(min(w, h))
    raise ValueError(f"unknown extent metric {metric!r}")


def size_bin_for(extent):
    for name, (lo, hi) in SIZE_BINS.items():
        if lo <= extent <= hi:
            return name
    return UNBINNED


@dataclass(frozen=True)
class TargetAnnotation:
    """One candidate target object in one source image."""

    image_id: str
    file_name: str
    image_size: tuple  # (width, height)
    bbox: tuple  # (x, y, w, h), integer pixels, inside the image
    category: str
    extent: float
    size_bin: str
    touches_border: bool = False

    def to_dict(self):
        return {
            "image_id": self.image_id,
            "file_name": self.file_name,
            "image_size": list(self.image_size),
            "bbox": list(self.bbox),
            "category": self.category,
            "extent": self.extent,
            "size_bin": self.size_bin,
            "touches_border": self.touches_border,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            image_id=d["image_id"],
            file_name=d["file_name"],
            image_size=tuple(d["image_size"]),
            bbox=tuple(d["bbox"]),
            category=d["category"],
            extent=d["extent"],
            size_bin=d["size_bin"],
            touches_border=d.get("touches_border", False),
        )


@dataclass
class IngestResult:
    targets: list = field(default_factory=list)
    errors: list = field(default_factory=list)  # dicts with reason + ids
    categories: list = field(default_factory=list)


def _integerize_bbox(bbox, width, height):
    """Round a float COCO bbox outward to integers and clip into bounds."""
    x, y, w, h = bbox
    x0 = max(0, math.floor(x))
    y0 = max(0, math.floor(y))
    x1 = min(width, math.ceil(x + w))
    y1 = min(height, math.ceil(y + h))
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        return None
    return (x0, y0, x1 - x0, y1 - y0)


def ingest_annotations(annotation_file, image_root, extent_metric="geomean",
                       skip_crowd=True):
    """Parse COCO instance annotations into TargetAnnotation records.

    Returns an IngestResult; entries with missing image files or invalid
    boxes are reported in .errors rather than aborting the run.
    """
    try:
        with open(annotation_file) as f:
            doc = json.load(f)
        images = {im["id"]: im for im in doc["images"]}
        categories = {c["id"]: c["name"] for c in doc["categories"]}
        annotations = doc["annotations"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise AnnotationFormatError(
            f"cannot parse {annotation_file}: {exc}") from exc

    result = IngestResult(categories=sorted(set(categories.values())))
    seen_files = {}
    for ann in annotations:
        ann_id = ann.get("id")
        if skip_crowd and ann.get("iscrowd"):
            continue
        image = images.get(ann.get("image_id"))
        if image is None:
            result.errors.append(
                {"annotation_id": ann_id, "reason": "unknown image_id"})
            continue
        category = categories.get(ann.get("category_id"))
        if category is None:
            result.errors.append(
                {"annotation_id": ann_id, "reason": "unknown category_id"})
            continue
        file_name = image["file_name"]
        if file_name not in seen_files:
            seen_files[file_name] = os.path.isfile(
                os.path.join(image_root, file_name))
        if not seen_files[file_name]:
            result.errors.append({
                "annotation_id": ann_id, "image_id": str(image["id"]),
                "reason": f"missing image file {file_name}"})
            continue
        width, height = image["width"], image["height"]
        bbox = _integerize_bbox(ann["bbox"], width, height)
        if bbox is None:
            result.errors.append({
                "annotation_id": ann_id, "image_id": str(image["id"]),
                "reason": "degenerate or out-of-bounds bbox"})
            continue
        x, y, w, h = bbox
        extent = compute_extent(w, h, extent_metric)
        result.targets.append(TargetAnnotation(
            image_id=str(image["id"]),
            file_name=file_name,
            image_size=(width, height),
            bbox=bbox,
            category=category,
            extent=extent,
            size_bin=size_bin_for(extent),
            touches_border=(x == 0 or y == 0 or x + w == width
                            or y + h == height),
        ))
    return result
