"""Session slices and cursors.

A session serves a balanced, seed-randomized slice of the manifest to
one subject: at most 2 trials per category, at most one trial per source
image, order randomized under the session seed, every trial served at
most once. Sessions and responses live in the same append-only store, so
a restarted service recovers cursors by replay.
"""

import threading
import time
from dataclasses import dataclass, field

import numpy as np

MODES = ("timed", "untimed_groundtruth")
MAX_PER_CATEGORY = 2


class SessionError(Exception):
    pass


class InfeasibleSessionError(SessionError):
    def __init__(self, deficit):
        self.deficit = deficit
        super().__init__(f"cannot satisfy session constraints: {deficit}")


@dataclass
class Session:
    session_id: str
    subject_id: str
    experiment: str
    mode: str
    seed: int
    trial_ids: list
    cursor: int = 0
    responded: set = field(default_factory=set)

    @property
    def done(self):
        return self.cursor >= len(self.trial_ids)

    def to_record(self):
        return {
            "kind": "session",
            "session_id": self.session_id,
            "subject_id": self.subject_id,
            "experiment": self.experiment,
            "mode": self.mode,
            "seed": self.seed,
            "trial_ids": list(self.trial_ids),
        }


def sample_session_slice(manifest, experiment, seed, mode="timed",
                         max_trials=None):
    """Choose and order the trials one subject will see.

    Ground-truth collection sessions serve only full-context trials
    (viewing time is lifted by the runner, not the manifest).
    """
    if mode not in MODES:
        raise SessionError(f"unknown mode {mode!r}")
    pool = [t for t in manifest.entries
            if experiment in ("all", t.experiment)]
    if mode == "untimed_groundtruth":
        pool = [t for t in manifest.entries if t.experiment == "A1_full"]
    if not pool:
        raise InfeasibleSessionError(f"no trials for experiment {experiment}")

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pool))
    per_category = {}
    used_images = set()
    chosen = []
    limit = max_trials if max_trials is not None else len(pool)
    for idx in order:
        trial = pool[idx]
        category = trial.target.category
        if per_category.get(category, 0) >= MAX_PER_CATEGORY:
            continue
        if trial.target.image_id in used_images:
            continue
        per_category[category] = per_category.get(category, 0) + 1
        used_images.add(trial.target.image_id)
        chosen.append(trial.trial_id)
        if len(chosen) >= limit:
            break
    if max_trials is not None and len(chosen) < max_trials:
        raise InfeasibleSessionError(
            f"requested {max_trials} trials, only {len(chosen)} satisfy "
            f"the at-most-{MAX_PER_CATEGORY}-per-category and "
            f"one-per-image constraints")
    return chosen


class SessionBook:
    """In-memory session registry backed by the append-only store."""

    def __init__(self, manifest, store):
        self.manifest = manifest
        self.by_id = manifest.by_id()
        self.store = store
        self.sessions = {}
        self._lock = threading.Lock()  # guards cursor advance + append
        self._replay()

    def _replay(self):
        for record in self.store.iter_records():
            if record.get("kind") == "session":
                session = Session(
                    session_id=record["session_id"],
                    subject_id=record["subject_id"],
                    experiment=record["experiment"],
                    mode=record["mode"],
                    seed=record["seed"],
                    trial_ids=list(record["trial_ids"]),
                )
                self.sessions[session.session_id] = session
            elif record.get("kind") == "response":
                session = self.sessions.get(record["session_id"])
                if session is None:
                    continue
                session.responded.add(record["trial_id"])
                if (session.cursor < len(session.trial_ids)
                        and session.trial_ids[session.cursor]
                        == record["trial_id"]):
                    session.cursor += 1

    def create(self, subject_id, experiment, seed, mode="timed",
               max_trials=None):
        trial_ids = sample_session_slice(self.manifest, experiment, seed,
                                         mode=mode, max_trials=max_trials)
        session_id = f"s-{subject_id}-{experiment}-{seed}"
        with self._lock:
            if session_id in self.sessions:
                raise SessionError(f"session {session_id} already exists")
            session = Session(session_id=session_id, subject_id=subject_id,
                              experiment=experiment, mode=mode, seed=seed,
                              trial_ids=trial_ids)
            self.store.append(session.to_record())
            self.sessions[session_id] = session
        return session

    def get(self, session_id):
        session = self.sessions.get(session_id)
        if session is None:
            raise SessionError(f"unknown session {session_id!r}")
        return session

    def current_trial(self, session_id):
        """The trial at the cursor, without advancing it; None when done."""
        session = self.get(session_id)
        if session.done:
            return None
        return self.by_id[session.trial_ids[session.cursor]]

    def record_response(self, session_id, trial_id, raw_answer, timing,
                        received_at=None):
        """Append the response and advance the cursor.

        Rejects duplicates and out-of-order submissions; the store is
        only touched for accepted responses.
        """
        with self._lock:
            session = self.get(session_id)
            if trial_id in session.responded:
                raise SessionError(f"duplicate response for trial {trial_id}")
            if session.done or session.trial_ids[session.cursor] != trial_id:
                expected = (None if session.done
                            else session.trial_ids[session.cursor])
                raise SessionError(f"out-of-order response: got {trial_id}, "
                                   f"expected {expected}")
            record = {
                "kind": "response",
                "session_id": session_id,
                "subject_id": session.subject_id,
                "trial_id": trial_id,
                "raw_answer": raw_answer,
                "timing": timing,
                "received_at": received_at if received_at is not None
                else time.time(),
            }
            self.store.append(record)
            session.responded.add(trial_id)
            session.cursor += 1
            return {"accepted": True, "cursor": session.cursor,
                    "remaining": len(session.trial_ids) - session.cursor}
