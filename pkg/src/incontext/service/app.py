"""HTTP surface of the experiment service.

Endpoints (stable paths; payloads below are the wire contract):
    POST /sessions                  {subject_id, experiment, seed, mode?,
                                     max_trials?} -> session summary
    GET  /sessions/{sid}            session summary
    GET  /sessions/{sid}/next       next trial (idempotent) or {"done": true}
    POST /sessions/{sid}/responses  {trial_id, raw_answer, timing} -> ack
    GET  /assets/{path}             stimulus file, immutable cache headers
    GET  /export                    responses joined with conditions, CSV
"""

import os

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, PlainTextResponse
from pydantic import BaseModel, Field

from ..stimuli import read_manifest
from .export import export_csv
from .sessions import InfeasibleSessionError, SessionBook, SessionError
from .store import ResponseStore


class CreateSessionRequest(BaseModel):
    subject_id: str = Field(min_length=1)
    experiment: str = "all"
    seed: int = 0
    mode: str = "timed"
    max_trials: int | None = None


class ResponseSubmission(BaseModel):
    trial_id: str
    raw_answer: str
    timing: list = Field(default_factory=list)


def _session_summary(session):
    return {
        "session_id": session.session_id,
        "subject_id": session.subject_id,
        "experiment": session.experiment,
        "mode": session.mode,
        "n_trials": len(session.trial_ids),
        "cursor": session.cursor,
        "done": session.done,
    }


def create_app(manifest_dir, store_path, assets_dir=None):
    manifest = read_manifest(manifest_dir)
    assets_root = os.path.abspath(assets_dir or manifest_dir)
    store = ResponseStore(store_path)
    book = SessionBook(manifest, store)

    app = FastAPI(title="incontext experiment service")
    app.state.book = book
    app.state.store = store
    app.state.manifest = manifest

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest):
        try:
            session = book.create(request.subject_id, request.experiment,
                                  request.seed, mode=request.mode,
                                  max_trials=request.max_trials)
        except InfeasibleSessionError as err:
            raise HTTPException(status_code=409, detail=str(err))
        except SessionError as err:
            raise HTTPException(status_code=400, detail=str(err))
        return _session_summary(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return _session_summary(book.get(session_id))
        except SessionError as err:
            raise HTTPException(status_code=404, detail=str(err))

    @app.get("/sessions/{session_id}/next")
    def next_trial(session_id: str):
        try:
            session = book.get(session_id)
            trial = book.current_trial(session_id)
        except SessionError as err:
            raise HTTPException(status_code=404, detail=str(err))
        if trial is None:
            return {"done": True, "n_trials": len(session.trial_ids)}
        payload = trial.to_dict()
        if session.mode == "untimed_groundtruth":
            # lift the exposure limit: the image stays until the answer
            payload["timing"] = [
                dict(entry, ms=None) if entry["phase"] == "image" else entry
                for entry in payload["timing"]]
        payload["assets"] = {role: f"/assets/{rel}"
                             for role, rel in trial.assets.items()}
        return {"done": False, "index": session.cursor,
                "n_trials": len(session.trial_ids), "trial": payload,
                "mode": session.mode}

    @app.post("/sessions/{session_id}/responses")
    def record_response(session_id: str, submission: ResponseSubmission):
        try:
            return book.record_response(session_id, submission.trial_id,
                                        submission.raw_answer,
                                        submission.timing)
        except SessionError as err:
            status = 404 if "unknown session" in str(err) else 409
            raise HTTPException(status_code=status, detail=str(err))

    @app.get("/assets/{asset_path:path}")
    def get_asset(asset_path: str):
        full = os.path.abspath(os.path.join(assets_root, asset_path))
        if not full.startswith(assets_root + os.sep):
            raise HTTPException(status_code=404, detail="no such asset")
        if not os.path.isfile(full):
            raise HTTPException(status_code=404, detail="no such asset")
        return FileResponse(
            full, headers={"Cache-Control": "public, max-age=31536000, "
                                            "immutable"})

    @app.get("/export", response_class=PlainTextResponse)
    def export(subject_id: str | None = None, experiment: str | None = None):
        return export_csv(store, manifest, subject_id=subject_id,
                          experiment=experiment)

    return app
