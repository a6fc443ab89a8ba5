"""HTTP session service for interactive reshaping (backend for the browser UI).

Sessions are in-memory: create one from a scene and a trajectory, post
commands to get all four agents' candidates with check outcomes, accept a
candidate to make it the session's current trajectory, and undo to step back.
Per-session mutations are serialized with a lock; distinct sessions are
independent.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict

from .agents import AgentKind
from .config import Config
from .constraints import InterpreterResult, parse_constraint_document
from .errors import (
    InterpretationError,
    ObjectResolutionError,
    OptimizationError,
    SchemaError,
    TransportError,
)
from .fileio import (
    outcome_to_dict,
    parse_scene_document,
    parse_trajectory_document,
    scene_object_to_dict,
)
from .pipeline import ReshapeResult, interpret, reshape
from .trajectory import Trajectory


class CreateSessionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scene: dict
    trajectory: dict


class CommandBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    text: str | None = None
    constraints: dict | None = None


class AcceptBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    agent: str


@dataclass
class Session:
    id: str
    scene: list
    initial: Trajectory
    current: Trajectory
    history: list[dict] = field(default_factory=list)
    snapshots: list[Trajectory] = field(default_factory=list)
    pending: ReshapeResult | None = None
    pending_command: str = ""
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def _traj_doc(traj: Trajectory) -> dict:
    return {"waypoints": [[float(v) for v in row] for row in traj.waypoints]}


def _report_docs(result: ReshapeResult) -> list[dict]:
    docs = []
    for report in result.reports:
        if report.round_index != result.round_index:
            continue
        candidate = result.candidates[report.agent]
        docs.append(
            {
                "agent": report.agent.value,
                "round": report.round_index,
                "passed": report.all_passed,
                "outcomes": [outcome_to_dict(o) for o in report.outcomes],
                "trajectory": _traj_doc(candidate),
            }
        )
    return docs


def create_app(config: Config | None = None) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="trajshaper session service")
    # the studio page is served from a different port; this is a local tool,
    # so any origin may talk to the session API
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return session

    def state_doc(session: Session) -> dict:
        doc: dict[str, Any] = {
            "session_id": session.id,
            "scene": {"objects": [scene_object_to_dict(o) for o in session.scene]},
            "initial_trajectory": _traj_doc(session.initial),
            "current_trajectory": _traj_doc(session.current),
            "history": [
                {"command": h["command"], "agent": h["agent"], "round": h["round"]}
                for h in session.history
            ],
            "pending": _report_docs(session.pending) if session.pending else [],
        }
        return doc

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        try:
            scene = parse_scene_document(json.dumps(body.scene))
            trajectory = parse_trajectory_document(json.dumps(body.trajectory))
        except SchemaError as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        session = Session(
            id=uuid.uuid4().hex, scene=scene, initial=trajectory, current=trajectory
        )
        with registry_lock:
            sessions[session.id] = session
        return {"session_id": session.id}

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return state_doc(get_session(session_id))

    @app.post("/sessions/{session_id}/command")
    def post_command(session_id: str, body: CommandBody):
        session = get_session(session_id)
        if (body.text is None) == (body.constraints is None):
            raise HTTPException(
                status_code=400, detail="provide exactly one of 'text' or 'constraints'"
            )
        with session.lock:
            try:
                if body.text is not None:
                    command = body.text
                    interpretation = interpret(command, session.scene, config)
                else:
                    command = "<constraint document>"
                    interpretation = InterpreterResult(
                        parse_constraint_document(json.dumps(body.constraints), session.scene)
                    )
            except (InterpretationError, ObjectResolutionError, SchemaError) as e:
                raise HTTPException(status_code=400, detail=str(e)) from e
            except TransportError as e:
                raise HTTPException(status_code=502, detail=str(e)) from e
            try:
                result = reshape(session.current, session.scene, interpretation, config)
            except OptimizationError as e:
                raise HTTPException(status_code=500, detail=str(e)) from e
            session.pending = result
            session.pending_command = command
            return {
                "round": result.round_index,
                "best_agent": result.best.agent.value,
                "reports": _report_docs(result),
            }

    @app.post("/sessions/{session_id}/accept")
    def accept(session_id: str, body: AcceptBody):
        session = get_session(session_id)
        with session.lock:
            if session.pending is None:
                raise HTTPException(status_code=400, detail="no pending candidates to accept")
            try:
                agent = AgentKind(body.agent)
            except ValueError as e:
                raise HTTPException(status_code=400, detail=f"unknown agent {body.agent!r}") from e
            candidate = session.pending.candidates.get(agent)
            if candidate is None:
                raise HTTPException(status_code=400, detail=f"agent {body.agent!r} has no candidate")
            session.snapshots.append(session.current)
            session.history.append(
                {
                    "command": session.pending_command,
                    "agent": agent.value,
                    "round": session.pending.round_index,
                }
            )
            session.current = candidate.rebased()
            session.pending = None
            session.pending_command = ""
            return state_doc(session)

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if not session.snapshots:
                raise HTTPException(status_code=400, detail="nothing to undo")
            session.current = session.snapshots.pop()
            session.history.pop()
            session.pending = None
            session.pending_command = ""
            return state_doc(session)

    return app
