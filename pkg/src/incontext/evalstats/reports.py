"""Per-condition aggregation and the human-model comparison table."""

import csv
from collections import defaultdict
from dataclasses import dataclass
from math import sqrt

from .scoring import score_response
from .stats import pearson_r

# the condition key: experiment + its parameters + the target size bin
GROUP_FIELDS = ("experiment", "co_ratio", "sigma", "grid", "congruence",
                "exposure_ms", "t1_ms", "t2_ms", "size_bin")

FAMILY_ORDER = ("A1", "A2", "B1", "B2", "B3", "B4", "B5", "C1", "C2", "C3")


@dataclass
class ConditionReport:
    key: tuple
    n: int
    accuracy: float
    sem: float
    sem_flag: str | None = None


def condition_report(records, grouping=GROUP_FIELDS):
    """Accuracy, SEM and count per condition group.

    `records` are mappings with a "correct" field; `grouping` is either a
    tuple of field names or a callable record -> key. Binary-outcome SEM
    uses the Bernoulli closed form sqrt(p(1-p)/n); single-record groups
    report sem 0 with an "n=1" flag.
    """
    if callable(grouping):
        keyfn = grouping
    else:
        keyfn = lambda r: tuple(str(r.get(f, "") or "") for f in grouping)
    groups = defaultdict(list)
    for record in records:
        groups[keyfn(record)].append(int(record["correct"]))
    reports = []
    for key in sorted(groups):
        outcomes = groups[key]
        n = len(outcomes)
        p = sum(outcomes) / n
        reports.append(ConditionReport(
            key=key, n=n, accuracy=p, sem=sqrt(p * (1.0 - p) / n),
            sem_flag="n=1" if n == 1 else None))
    return reports


def correlate_human_model(human_accuracies, model_accuracies):
    """Pearson r between paired per-condition accuracy vectors."""
    return pearson_r(human_accuracies, model_accuracies)


def paired_accuracies(human_reports, model_reports):
    """Accuracy vectors over the condition keys both sides share."""
    h = {r.key: r.accuracy for r in human_reports}
    m = {r.key: r.accuracy for r in model_reports}
    common = sorted(set(h) & set(m))
    return ([h[k] for k in common], [m[k] for k in common], common)


def model_records_from_results(rows, readout_only=True):
    """Rows of a recognizer results CSV -> scoring records."""
    records = []
    for row in rows:
        if readout_only and str(row.get("readout", "1")) != "1":
            continue
        records.append(row)
    return records


def human_records_from_responses(rows, answer_key, synonyms=None):
    """Score exported subject responses against the answer key."""
    records = []
    for row in rows:
        correct = score_response(row["trial_id"], row.get("raw_answer", ""),
                                 answer_key, synonyms)
        record = dict(row)
        record["correct"] = int(correct)
        records.append(record)
    return records


def _family(report):
    return report.key[0].split("_")[0]


def summary_table(human_reports, model_reports):
    """Accuracy and correlation per experiment family (Table-style layout).

    Family accuracy is the unweighted mean over its condition cells;
    the correlation needs at least 3 shared cells with variance on both
    sides, otherwise it is reported as None.
    """
    rows = {}
    by_family_h = defaultdict(list)
    by_family_m = defaultdict(list)
    for r in human_reports:
        by_family_h[_family(r)].append(r)
    for r in model_reports:
        by_family_m[_family(r)].append(r)
    families = [f for f in FAMILY_ORDER
                if f in by_family_h or f in by_family_m]
    families += sorted(set(by_family_h) | set(by_family_m)
                       - set(FAMILY_ORDER) - set(families))
    for family in families:
        h = by_family_h.get(family, [])
        m = by_family_m.get(family, [])
        entry = {
            "human_accuracy": (sum(r.accuracy for r in h) / len(h)) if h
            else None,
            "model_accuracy": (sum(r.accuracy for r in m) / len(m)) if m
            else None,
            "correlation": None,
            "n_conditions": None,
        }
        hv, mv, common = paired_accuracies(h, m)
        entry["n_conditions"] = len(common)
        if len(common) >= 3:
            try:
                entry["correlation"] = correlate_human_model(hv, mv)
            except ValueError:
                entry["correlation"] = None
        rows[family] = entry
    return rows


def write_condition_csv(path, reports):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(list(GROUP_FIELDS) + ["n", "accuracy", "sem",
                                              "sem_flag"])
        for r in reports:
            writer.writerow(list(r.key) + [r.n, f"{r.accuracy:.6f}",
                                           f"{r.sem:.6f}", r.sem_flag or ""])


def write_summary_csv(path, table):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        families = list(table)
        writer.writerow(["row"] + families)
        for label, field in (("human_accuracy", "human_accuracy"),
                             ("model_accuracy", "model_accuracy"),
                             ("human_model_correlation", "correlation"),
                             ("n_conditions", "n_conditions")):
            row = [label]
            for fam in families:
                value = table[fam][field]
                row.append("" if value is None else
                           (f"{value:.4f}" if isinstance(value, float)
                            else value))
            writer.writerow(row)


def format_summary(table):
    families = list(table)
    width = max([6] + [len(f) for f in families]) + 2
    head = "".ljust(26) + "".join(f.rjust(width) for f in families)
    lines = [head]
    for label, field in (("accuracy (human)", "human_accuracy"),
                         ("accuracy (model)", "model_accuracy"),
                         ("correlation", "correlation")):
        cells = []
        for fam in families:
            value = table[fam][field]
            cells.append(("-" if value is None else f"{value:.3f}")
                         .rjust(width))
        lines.append(label.ljust(26) + "".join(cells))
    return "\n".join(lines)
