"""HTTP session service: serves plan execution to the walker UI.

The client is stateless; every response carries the full prompt state.
Events within a session are applied serially under a per-session lock.
"""
from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse
from pydantic import BaseModel

from .hierarchy import HierPlan, plan_to_dict
from .model import HierNode
from .session import IllegalEvent, Session


@dataclass
class PlanEntry:
    plan_id: str
    plan: HierPlan
    root: HierNode


class CreateSessionRequest(BaseModel):
    plan_id: str


class EventRequest(BaseModel):
    kind: str
    outcome: str


def create_app(plans: dict[str, PlanEntry], static_html: str | None = None) -> FastAPI:
    app = FastAPI(title="fixplan session service")
    sessions: dict[str, Session] = {}
    locks: dict[str, threading.Lock] = {}

    @app.get("/plans")
    def list_plans():
        return {"plans": [
            {"plan_id": e.plan_id, "root": e.plan.node, "h": e.plan.h,
             "p": e.plan.p, "ec": e.plan.ec}
            for e in plans.values()]}

    @app.get("/plans/{plan_id}")
    def get_plan(plan_id: str):
        if plan_id not in plans:
            raise HTTPException(404, f"unknown plan {plan_id!r}")
        return plan_to_dict(plans[plan_id].plan)

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        if req.plan_id not in plans:
            raise HTTPException(404, f"unknown plan {req.plan_id!r}")
        entry = plans[req.plan_id]
        sid = uuid.uuid4().hex
        session = Session(sid, entry.plan_id, entry.plan, entry.root)
        sessions[sid] = session
        locks[sid] = threading.Lock()
        return {"session_id": sid, **session.view()}

    def _get(sid: str) -> Session:
        if sid not in sessions:
            raise HTTPException(404, f"unknown session {sid!r}")
        return sessions[sid]

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session = _get(sid)
        return {"session_id": sid, **session.view()}

    @app.post("/sessions/{sid}/events")
    def post_event(sid: str, req: EventRequest):
        session = _get(sid)
        with locks[sid]:
            try:
                session.apply(req.kind, req.outcome)
            except IllegalEvent as exc:
                raise HTTPException(409, str(exc)) from exc
            return {"session_id": sid, **session.view()}

    @app.get("/sessions/{sid}/transcript")
    def get_transcript(sid: str):
        return _get(sid).transcript()

    if static_html is not None:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return static_html

    return app
