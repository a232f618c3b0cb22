import csv
import io
import os

import pytest
from fastapi.testclient import TestClient

from incontext.evalstats import (condition_report, human_records_from_responses)
from incontext.service import create_app
from incontext.stimuli import (StimulusCondition, TimingConfig,
                               compose_trial_manifest, ingest_annotations)
from incontext.stimuli.images import load_rgb
from incontext.stimuli.synthetic import SyntheticConfig, build_synthetic_dataset


@pytest.fixture(scope="module")
def served(tmp_path_factory):
    root = tmp_path_factory.mktemp("served")
    paths = build_synthetic_dataset(
        str(root), n_images=24,
        cfg=SyntheticConfig(classes=8, image_size=32, object_sizes=(8,)),
        seed=3)
    result = ingest_annotations(paths["annotations"], paths["images"])
    out = str(root / "manifest")
    loader = lambda t: load_rgb(os.path.join(paths["images"], t.file_name))
    manifest = compose_trial_manifest(
        result.targets, [StimulusCondition("A1_full"),
                         StimulusCondition("A1_minimal")],
        TimingConfig(), out, loader)
    app = create_app(out, str(root / "store.jsonl"))
    return TestClient(app), manifest


def test_full_session_round_trip(served):
    client, manifest = served
    created = client.post("/sessions", json={
        "subject_id": "alice", "experiment": "all", "seed": 7,
        "max_trials": 10})
    assert created.status_code == 200
    sid = created.json()["session_id"]
    assert created.json()["n_trials"] == 10

    answered = 0
    while True:
        nxt = client.get(f"/sessions/{sid}/next")
        assert nxt.status_code == 200
        body = nxt.json()
        if body["done"]:
            break
        trial = body["trial"]
        # assets are served with immutable caching
        asset = client.get(trial["assets"]["image"])
        assert asset.status_code == 200
        assert "immutable" in asset.headers["cache-control"]
        assert asset.headers["content-type"] == "image/png"
        answer = trial["target"]["category"] if answered % 2 == 0 else "wrong"
        ack = client.post(f"/sessions/{sid}/responses", json={
            "trial_id": trial["trial_id"], "raw_answer": answer,
            "timing": [{"phase": "image", "requested_ms": 200,
                        "measured_ms": 200.4}]})
        assert ack.status_code == 200
        answered += 1
    assert answered == 10

    # duplicate submission is rejected and the store is unchanged
    dup = client.post(f"/sessions/{sid}/responses", json={
        "trial_id": trial["trial_id"], "raw_answer": "again", "timing": []})
    assert dup.status_code == 409

    export = client.get("/export")
    rows = list(csv.DictReader(io.StringIO(export.text)))
    mine = [r for r in rows if r["session_id"] == sid]
    assert len(mine) == 10

    # responses score through the harness exactly as submitted
    key = {e.trial_id: {e.target.category} for e in manifest.entries}
    records = human_records_from_responses(mine, key)
    assert sum(r["correct"] for r in records) == 5
    reports = condition_report(records)
    assert sum(r.n for r in reports) == 10


def test_untimed_groundtruth_lifts_exposure(served):
    client, _ = served
    created = client.post("/sessions", json={
        "subject_id": "bob", "experiment": "all", "seed": 1,
        "mode": "untimed_groundtruth", "max_trials": 4})
    sid = created.json()["session_id"]
    body = client.get(f"/sessions/{sid}/next").json()
    trial = body["trial"]
    assert trial["experiment"] == "A1_full"
    image_phases = [e for e in trial["timing"] if e["phase"] == "image"]
    assert image_phases and all(e["ms"] is None for e in image_phases)


def test_unknown_session_404(served):
    client, _ = served
    assert client.get("/sessions/nope/next").status_code == 404


def test_infeasible_session_409(served):
    client, _ = served
    r = client.post("/sessions", json={
        "subject_id": "carol", "experiment": "all", "seed": 2,
        "max_trials": 5000})
    assert r.status_code == 409


def test_asset_traversal_blocked(served):
    client, _ = served
    assert client.get("/assets/../store.jsonl").status_code == 404


def test_session_creation_deterministic_and_unique(served):
    client, _ = served
    a = client.post("/sessions", json={"subject_id": "dave",
                                       "experiment": "all", "seed": 3})
    assert a.status_code == 200
    b = client.post("/sessions", json={"subject_id": "dave",
                                       "experiment": "all", "seed": 3})
    assert b.status_code == 400  # same (subject, seed) -> same session id
