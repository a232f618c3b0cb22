"""Response export for the evaluation harness.

One CSV row per stored response, joined with the trial's condition
fields, in byte-stable (session, trial-index) order.
"""

import csv
import io
import json

EXPORT_COLUMNS = [
    "session_id", "subject_id", "trial_id", "experiment", "category",
    "size_bin", "extent", "co_ratio", "sigma", "grid", "congruence",
    "exposure_ms", "t1_ms", "t2_ms", "raw_answer", "timing", "received_at",
]


def export_rows(store, manifest, subject_id=None, experiment=None):
    by_id = manifest.by_id()
    session_order = {}
    rows = []
    for record in store.iter_records():
        if record.get("kind") == "session":
            session_order[record["session_id"]] = {
                tid: i for i, tid in enumerate(record["trial_ids"])}
        if record.get("kind") != "response":
            continue
        if subject_id and record.get("subject_id") != subject_id:
            continue
        entry = by_id.get(record["trial_id"])
        if entry is None:
            continue
        if experiment and entry.experiment != experiment:
            continue
        cond = entry.condition
        rows.append({
            "session_id": record["session_id"],
            "subject_id": record.get("subject_id", ""),
            "trial_id": record["trial_id"],
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
            "raw_answer": record["raw_answer"],
            "timing": record.get("timing"),
            "received_at": record.get("received_at"),
        })
    rows.sort(key=lambda r: (
        r["session_id"],
        session_order.get(r["session_id"], {}).get(r["trial_id"], 1 << 30)))
    return rows


def export_csv(store, manifest, subject_id=None, experiment=None):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=EXPORT_COLUMNS)
    writer.writeheader()
    for row in export_rows(store, manifest, subject_id, experiment):
        row = dict(row)
        for key, value in row.items():
            if value is None:
                row[key] = ""
        if not isinstance(row["timing"], str):
            row["timing"] = json.dumps(row["timing"], sort_keys=True)
        writer.writerow(row)
    return buf.getvalue()
