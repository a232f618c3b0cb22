"""Response scoring: free-form matching and N-way top-k accuracy."""

import json

import numpy as np

from .normalize import default_synonyms, normalize_answer


class UnknownTrialError(KeyError):
    pass


def load_answer_key(path, synonyms=None):
    """Answer key file: {trial_id: [acceptable strings]}; normalized here."""
    synonyms = synonyms or default_synonyms()
    with open(path) as f:
        raw = json.load(f)
    key = {}
    for trial_id, answers in raw.items():
        if not answers:
            raise ValueError(f"empty answer set for trial {trial_id}")
        key[trial_id] = {normalize_answer(a, synonyms) for a in answers}
    return key


def build_answer_key(manifest):
    """Target categories as a minimal answer key for a manifest."""
    return {entry.trial_id: [entry.target.category]
            for entry in manifest.entries}


def score_freeform(raw_answer, key_entry, synonyms=None):
    """True iff the normalized answer is in the (normalized) key set."""
    synonyms = synonyms or default_synonyms()
    normalized_key = {normalize_answer(k, synonyms) for k in key_entry}
    return normalize_answer(raw_answer, synonyms) in normalized_key


def score_response(trial_id, raw_answer, answer_key, synonyms=None):
    if trial_id not in answer_key:
        raise UnknownTrialError(f"trial {trial_id!r} not in the answer key")
    return score_freeform(raw_answer, answer_key[trial_id], synonyms)


def topk_accuracy(probabilities, labels, k):
    """Fraction of rows whose true label is among the k most probable.

    Ties rank the lower class index first, so results are deterministic.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    probs = np.asarray(probabilities, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.ndim != 2 or probs.shape[0] != labels.shape[0]:
        raise ValueError("probabilities must be (N, C) matching labels")
    order = np.argsort(-probs, axis=1, kind="stable")[:, :k]
    hits = (order == labels[:, None]).any(axis=1)
    return float(hits.mean()) if labels.size else 0.0
