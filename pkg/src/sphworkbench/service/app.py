"""HTTP session service: create sessions, post actions, stream events,
fetch artifacts.

One writer per session (every mutating request takes the session lock);
any number of readers.  The event stream is server-sent events, replaying
from an optional `since` sequence number and then following live.
Approval automatically launches the simulation phase on a worker thread
(inline when the service is built with sync_run=True, which tests use).
"""

from __future__ import annotations

import json
import os
import threading

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, StreamingResponse

from ..cases import builtin_truth
from ..orchestrator.planner import InputEnvelope, PlannerInterface, ScriptedPlanner
from ..orchestrator.session import Action, Phase, Session, SessionConfig
from .schemas import (
    ActionRequest,
    CreateSessionRequest,
    EventModel,
    PostprocRequest,
    SessionSnapshot,
)

__all__ = ["create_app"]

SSE_HEARTBEAT_S = 15.0


class _Managed:
    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()
        self.cond = threading.Condition()
        session.on_event = self._notify

    def _notify(self, event) -> None:
        with self.cond:
            self.cond.notify_all()


class _Manager:
    def __init__(self):
        self._sessions: dict[str, _Managed] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def new_id(self) -> str:
        with self._lock:
            self._counter += 1
            return f"s{self._counter:04d}"

    def add(self, session: Session) -> _Managed:
        managed = _Managed(session)
        with self._lock:
            self._sessions[session.session_id] = managed
        return managed

    def get(self, session_id: str) -> _Managed:
        with self._lock:
            managed = self._sessions.get(session_id)
        if managed is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        return managed


def create_app(out_root: str, planner_factory=None, hitl_cap: int = 5,
               sync_run: bool = False, export_formats: tuple[str, ...] = ("csv", "vtk")) -> FastAPI:
    """Build the service; planner_factory() returns a fresh planner per session."""
    app = FastAPI(title="sphworkbench session service")
    manager = _Manager()
    app.state.manager = manager
    if planner_factory is None:
        planner_factory = ScriptedPlanner

    def _run_phase2(managed: _Managed) -> None:
        with managed.lock:
            managed.session.run_phase2()

    @app.post("/sessions", response_model=SessionSnapshot)
    def create_session(req: CreateSessionRequest):
        try:
            envelope = InputEnvelope(text=req.text, image_ref=req.image_ref,
                                     xml_ref=req.xml)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        truth = builtin_truth(req.benchmark) if req.benchmark else None
        config = SessionConfig(out_root=out_root, hitl_cap=hitl_cap, truth=truth,
                               export_formats=export_formats)
        planner: PlannerInterface = planner_factory()
        session = Session(manager.new_id(), planner, config)
        managed = manager.add(session)
        with managed.lock:
            session.start(envelope)
        return session.snapshot()

    @app.get("/sessions/{session_id}", response_model=SessionSnapshot)
    def get_snapshot(session_id: str):
        managed = manager.get(session_id)
        with managed.lock:
            return managed.session.snapshot()

    @app.post("/sessions/{session_id}/actions", response_model=SessionSnapshot)
    def post_action(session_id: str, req: ActionRequest):
        managed = manager.get(session_id)
        with managed.lock:
            try:
                managed.session.hitl_turn(Action(kind=req.kind, text=req.text, xml=req.xml))
            except ValueError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            snapshot = managed.session.snapshot()
        if req.kind == "approve":
            if sync_run:
                _run_phase2(managed)
                with managed.lock:
                    snapshot = managed.session.snapshot()
            else:
                threading.Thread(target=_run_phase2, args=(managed,), daemon=True).start()
        return snapshot

    @app.post("/sessions/{session_id}/postproc", response_model=SessionSnapshot)
    def post_postproc(session_id: str, req: PostprocRequest):
        managed = manager.get(session_id)
        with managed.lock:
            try:
                managed.session.postproc_request(req.text)
            except ValueError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            return managed.session.snapshot()

    @app.get("/sessions/{session_id}/events")
    def stream_events(session_id: str, since: int = 0, follow: bool = True):
        managed = manager.get(session_id)

        def sse():
            cursor = since
            while True:
                with managed.lock:
                    events = list(managed.session.transcript[cursor:])
                    phase = managed.session.phase
                for event in events:
                    body = json.dumps({"kind": event.kind, "payload": event.payload},
                                      sort_keys=True)
                    yield f"id: {event.seq}\nevent: session\ndata: {body}\n\n"
                    cursor = event.seq + 1
                if not follow or phase == Phase.CLOSED:
                    return
                with managed.cond:
                    managed.cond.wait(timeout=SSE_HEARTBEAT_S)
                with managed.lock:
                    if len(managed.session.transcript) == cursor:
                        yield ": heartbeat\n\n"

        return StreamingResponse(sse(), media_type="text/event-stream")

    @app.get("/sessions/{session_id}/events/list", response_model=list[EventModel])
    def list_events(session_id: str, since: int = 0):
        managed = manager.get(session_id)
        with managed.lock:
            return [EventModel(seq=e.seq, kind=e.kind, payload=e.payload)
                    for e in managed.session.transcript[since:]]

    @app.get("/sessions/{session_id}/artifacts", response_model=list[str])
    def list_artifacts(session_id: str):
        managed = manager.get(session_id)
        with managed.lock:
            return sorted(os.listdir(managed.session.artifacts_dir))

    @app.get("/sessions/{session_id}/artifacts/{name}")
    def get_artifact(session_id: str, name: str):
        managed = manager.get(session_id)
        path = os.path.join(managed.session.artifacts_dir, os.path.basename(name))
        if not os.path.isfile(path):
            raise HTTPException(status_code=404, detail=f"no artifact {name!r}")
        media = "image/svg+xml" if name.endswith(".svg") else "text/plain"
        return FileResponse(path, media_type=media)

    return app
