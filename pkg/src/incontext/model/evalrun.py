"""Checkpoint evaluation over a trial manifest.

Each trial's timing schedule is mapped to per-step inputs (stimulus,
mask continuation, or context/object split), the recognizer runs N-way
over the label set it was trained with, and one CSV row is written per
(trial, step). Trials whose schedules exceed the readout horizon are
skipped with a reason.
"""

import csv
import os
from collections import defaultdict

import numpy as np

from ..stimuli.images import load_rgb
from .schedule import ScheduleError, schedule_inputs
from .streams import preprocess_streams

RESULT_COLUMNS = [
    "trial_id", "experiment", "category", "size_bin", "extent",
    "co_ratio", "sigma", "grid", "congruence", "exposure_ms",
    "t1_ms", "t2_ms", "step", "steps_total", "predicted_label",
    "correct", "readout",
]


def effective_bbox(entry):
    """Target bbox in asset coordinates (crops shift the origin)."""
    x, y, w, h = entry.target.bbox
    window = entry.meta.get("window")
    if window:
        return (x - window[0], y - window[1], w, h)
    return (x, y, w, h)


def _prep_trial(entry, manifest_dir, config, roles):
    bbox = effective_bbox(entry)
    prepped = {}
    for role in dict.fromkeys(roles):
        img = load_rgb(os.path.join(manifest_dir, entry.assets[role]))
        prepped[role] = preprocess_streams(img, bbox, config)
    return prepped


def _rows_for_trial(entry, labels_per_step, categories):
    steps_total = len(labels_per_step)
    cond = entry.condition
    rows = []
    for t, label_idx in enumerate(labels_per_step):
        predicted = categories[int(label_idx)]
        rows.append({
            "trial_id": entry.trial_id,
            "experiment": entry.experiment,
            "category": entry.target.category,
            "size_bin": entry.target.size_bin,
            "extent": entry.target.extent,
            "co_ratio": cond.co_ratio,
            "sigma": cond.sigma,
            "grid": cond.grid,
            "congruence": cond.congruence,
            "exposure_ms": cond.exposure_ms,
            "t1_ms": cond.t1_ms,
            "t2_ms": cond.t2_ms,
            "step": t + 1,
            "steps_total": steps_total,
            "predicted_label": predicted,
            "correct": int(predicted == entry.target.category),
            "readout": int(t + 1 == steps_total),
        })
    return rows


def evaluate_manifest(model, categories, manifest, manifest_dir, out_csv,
                      attention_dir=None, batch_size=64):
    """Run the model over every manifest trial; returns (n_trials, skipped)."""
    config = model.config
    groups = defaultdict(list)
    skipped = []
    for entry in manifest.entries:
        try:
            roles = schedule_inputs(entry.timing, config.horizon)
        except ScheduleError as err:
            skipped.append((entry.trial_id, str(err)))
            continue
        groups[tuple(roles)].append(entry)

    os.makedirs(os.path.dirname(os.path.abspath(out_csv)), exist_ok=True)
    if attention_dir:
        os.makedirs(attention_dir, exist_ok=True)
    n_trials = 0
    with open(out_csv, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        for roles, entries in sorted(groups.items()):
            for lo in range(0, len(entries), batch_size):
                chunk = entries[lo:lo + batch_size]
                preps = [_prep_trial(e, manifest_dir, config, roles)
                         for e in chunk]
                stacked = {}
                for role in dict.fromkeys(roles):
                    ctx = np.stack([p[role].context for p in preps])
                    obj = None
                    if preps[0][role].object_ is not None:
                        obj = np.stack([p[role].object_ for p in preps])
                    stacked[role] = {"ctx": ctx, "obj": obj}
                step_images = [stacked[role] for role in roles]
                result = model.forward_scheduled(step_images)
                labels = np.stack(result.labels, axis=1)  # (B, T)
                for b, entry in enumerate(chunk):
                    writer.writerows(_rows_for_trial(
                        entry, labels[b], categories))
                    n_trials += 1
                    if attention_dir:
                        _dump_attention(result, b, entry, attention_dir)
    return n_trials, skipped


def _dump_attention(result, index, entry, attention_dir):
    arrays = {}
    for stream, states in result.attention.items():
        if states:
            arrays[f"alpha_{stream}"] = np.stack(
                [s.alpha[index] for s in states])
            arrays[f"beta_{stream}"] = np.stack(
                [s.beta[index] for s in states])
    np.savez(os.path.join(attention_dir, f"{entry.trial_id}.npz"), **arrays)
