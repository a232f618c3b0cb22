"""Trial manifest: renderable trials with assets and timing schedules.

The manifest is written as `manifest.jsonl` (one trial per line) next to
an `assets/` tree and a `generator_config.json` echo carrying the dataset
digest, the full generation parameters, and any dropped entries.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from .annotations import TargetAnnotation
from .conditions import StimulusCondition
from .images import file_digest, quantize, save_png, stable_seed
from . import transforms

MS_PER_STEP = 25

PHASES = ("fixation", "cue", "image", "mask", "context_only", "object_only")


@dataclass
class TimingConfig:
    fixation_ms: int = 500
    cue_ms: int = 1000
    exposure_ms: int = 200   # sync experiments without their own exposure
    mask_ms: int = 200       # backward-mask display time


@dataclass
class TrialSpec:
    trial_id: str
    experiment: str
    target: TargetAnnotation
    condition: StimulusCondition
    assets: dict            # role -> path relative to the manifest dir
    timing: list            # [{"phase": str, "ms": int}] in presentation order
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "trial_id": self.trial_id,
            "experiment": self.experiment,
            "target": self.target.to_dict(),
            "condition": self.condition.to_dict(),
            "assets": self.assets,
            "timing": self.timing,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            trial_id=d["trial_id"],
            experiment=d["experiment"],
            target=TargetAnnotation.from_dict(d["target"]),
            condition=StimulusCondition.from_dict(d["condition"]),
            assets=d["assets"],
            timing=d["timing"],
            meta=d.get("meta", {}),
        )


@dataclass
class Manifest:
    entries: list
    dataset_digest: str
    generator_config: dict

    def by_id(self):
        return {t.trial_id: t for t in self.entries}


def _check_schedule(timing):
    for entry in timing:
        ms = entry["ms"]
        if entry["phase"] not in PHASES:
            raise ValueError(f"unknown phase {entry['phase']!r}")
        if ms is not None and (ms <= 0 or ms % MS_PER_STEP != 0):
            raise ValueError(
                f"{entry['phase']} duration {ms} is not a positive multiple "
                f"of {MS_PER_STEP} ms")
    return timing


def build_schedule(condition, timing_cfg):
    """Presentation schedule for one trial of the given condition."""
    head = [
        {"phase": "fixation", "ms": timing_cfg.fixation_ms},
        {"phase": "cue", "ms": timing_cfg.cue_ms},
    ]
    exp = condition.experiment
    if exp == "C2_masking":
        tail = [{"phase": "image", "ms": condition.exposure_ms},
                {"phase": "mask", "ms": timing_cfg.mask_ms}]
    elif exp == "C1_exposure":
        tail = [{"phase": "image", "ms": condition.exposure_ms}]
    elif exp == "C3_async":
        tail = [{"phase": "context_only", "ms": condition.t1_ms},
                {"phase": "object_only", "ms": condition.t2_ms}]
    else:
        tail = [{"phase": "image", "ms": timing_cfg.exposure_ms}]
    return _check_schedule(head + tail)


class TrialDropped(Exception):
    def __init__(self, reason, meta=None):
        super().__init__(reason)
        self.reason = reason
        self.meta = meta or {}


def render_condition(image, target, condition, donor_pool=None,
                     load_image=None):
    """Render the assets for one (target, condition) pair.

    Returns (assets: role -> uint8 array, meta) or raises TrialDropped
    with the reason a trial cannot be produced.
    """
    rng = np.random.default_rng(stable_seed(
        condition.seed, condition.experiment, condition.param_tag(),
        target.image_id))
    bbox = target.bbox
    exp = condition.experiment
    meta = {}

    if exp in ("A1_full", "C1_exposure"):
        return {"image": image}, meta
    if exp == "A1_minimal":
        return {"image": transforms.gen_minimal_context(image, bbox)}, meta
    if exp == "A2_co":
        crop = transforms.gen_co_crop(image, bbox, condition.co_ratio)
        meta = {"achieved_ratio": crop.achieved_ratio,
                "clamped": crop.clamped, "window": list(crop.window)}
        if not crop.feasible:
            raise TrialDropped(
                f"co_ratio {condition.co_ratio} infeasible "
                f"(achieved {crop.achieved_ratio:.2f})", meta)
        return {"image": crop.image}, meta
    if exp == "B1_blur_ctx":
        return {"image": transforms.gen_blur(
            image, bbox, condition.sigma, "context")}, meta
    if exp == "B2_blur_obj":
        return {"image": transforms.gen_blur(
            image, bbox, condition.sigma, "object")}, meta
    if exp == "B3_texture":
        return {"image": transforms.gen_texture_context(image, bbox, rng)}, meta
    if exp == "B4_jigsaw":
        out = transforms.gen_jigsaw(image, bbox, condition.grid, rng)
        if out is None:
            raise TrialDropped(
                f"object spans more than one {condition.grid} piece", meta)
        return {"image": out}, meta
    if exp == "B5_congruence":
        paste = transforms.gen_congruence_paste(
            target, donor_pool or [], condition.congruence, rng, load_image,
            target_image=image)
        if paste is None:
            raise TrialDropped(
                f"no eligible {condition.congruence} donor", meta)
        meta = {"donor_image": paste.donor.image_id}
        return {"image": paste.image}, meta
    if exp == "C2_masking":
        mask = quantize(transforms.phase_scramble(image, rng))
        return {"image": image, "mask": mask}, meta
    if exp == "C3_async":
        context_only = image.copy()
        x, y, w, h = bbox
        context_only[y:y + h, x:x + w] = np.asarray(
            transforms.MID_GRAY, dtype=np.uint8)
        object_only = transforms.gen_minimal_context(image, bbox)
        return {"context_only": context_only, "object_only": object_only}, meta
    raise ValueError(f"unhandled experiment {exp!r}")


def compose_trial_manifest(skeleton, conditions, timing_cfg, out_dir,
                           load_image, generator_config=None,
                           donor_pool=None):
    """Render every (target, condition) pair and write the manifest.

    Asset render failures drop the trial with a logged reason; everything
    else is written to disk with a content digest for regeneration checks.
    """
    by_image = {}
    for t in skeleton:
        if by_image.setdefault(t.image_id, t) is not t:
            raise ValueError(
                f"multiple targets for image {t.image_id}; one is allowed")

    entries = []
    dropped = []
    for condition in conditions:
        exp = condition.experiment
        for target in skeleton:
            trial_id = f"{exp}.{condition.param_tag()}.{target.image_id}"
            image = load_image(target)
            try:
                assets, meta = render_condition(
                    image, target, condition, donor_pool=donor_pool,
                    load_image=load_image)
            except TrialDropped as drop:
                dropped.append({"trial_id": trial_id, "reason": drop.reason,
                                "meta": drop.meta})
                continue
            asset_paths = {}
            for role, arr in assets.items():
                rel = os.path.join("assets", exp, f"{trial_id}.{role}.png")
                save_png(os.path.join(out_dir, rel), arr)
                asset_paths[role] = rel
            entries.append(TrialSpec(
                trial_id=trial_id,
                experiment=exp,
                target=target,
                condition=condition,
                assets=asset_paths,
                timing=build_schedule(condition, timing_cfg),
                meta=meta,
            ))

    digest = hashlib.sha256()
    for entry in sorted(entries, key=lambda e: e.trial_id):
        digest.update(entry.trial_id.encode())
        for role in sorted(entry.assets):
            digest.update(role.encode())
            digest.update(file_digest(
                os.path.join(out_dir, entry.assets[role])).encode())

    config = dict(generator_config or {})
    config["timing"] = asdict(timing_cfg)
    config["conditions"] = [c.to_dict() for c in conditions]
    config["dropped"] = dropped
    manifest = Manifest(entries=entries, dataset_digest=digest.hexdigest(),
                        generator_config=config)
    write_manifest(manifest, out_dir)
    return manifest


def write_manifest(manifest, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "manifest.jsonl"), "w") as f:
        for entry in manifest.entries:
            f.write(json.dumps(entry.to_dict(), sort_keys=True) + "\n")
    with open(os.path.join(out_dir, "generator_config.json"), "w") as f:
        json.dump({"dataset_digest": manifest.dataset_digest,
                   "generator_config": manifest.generator_config},
                  f, sort_keys=True, indent=2)
        f.write("\n")


def read_manifest(manifest_dir):
    """Load a manifest directory (or a path to its manifest.jsonl)."""
    if manifest_dir.endswith(".jsonl"):
        manifest_dir = os.path.dirname(os.path.abspath(manifest_dir))
    entries = []
    with open(os.path.join(manifest_dir, "manifest.jsonl")) as f:
        for line in f:
            if line.strip():
                entries.append(TrialSpec.from_dict(json.loads(line)))
    digest, config = "", {}
    cfg_path = os.path.join(manifest_dir, "generator_config.json")
    if os.path.exists(cfg_path):
        with open(cfg_path) as f:
            doc = json.load(f)
        digest = doc.get("dataset_digest", "")
        config = doc.get("generator_config", {})
    return Manifest(entries=entries, dataset_digest=digest,
                    generator_config=config)
