"""JSON-over-HTTP session service.

Wire forms:

* reference — ``{"span": [start, end]}``, ``{"id": "c0"}``, or
  ``{"x": 150, "y": 60}``
* prompt segment — ``{"literal": "…"}`` or
  ``{"objectWord": {"ref": <reference>, "display": "…"}}`` (slot
  segments are never accepted over the wire)
* changes — ``{"kind": "text", "spans": [{"span": [s, e], "kind":
  "replaced"}]}`` or ``{"kind": "svg", "added": [...], "removed":
  [...], "modified": [...]}``

Engine errors map to ``{"error": <class name>, "message": …}`` with
404 for unknown ids, 409 for busy/cancelled, 400 for content that does
not parse, 502 for backend trouble, and 422 otherwise.
"""

from __future__ import annotations

import json
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backend import Backend
from .document import (
    ChangeSet,
    Document,
    ObjectRef,
    Selection,
    SvgElementId,
    SvgPoint,
    TextSpan,
)
from .engineering import DEFAULT_MODEL
from .errors import (
    BackendError,
    Busy,
    Cancelled,
    EngineError,
    NotSvg,
    ParseError,
    UnknownSession,
    UnknownTool,
)
from .orchestrator import EditSession, OperationResult
from .prompt import ComposedPrompt, LiteralText, ObjectWord, PromptSegment
from .tools import Tool


class BadRequest(EngineError):
    """Request body does not match the wire forms."""


_STATUS = {
    UnknownSession: 404,
    UnknownTool: 404,
    Busy: 409,
    Cancelled: 409,
    ParseError: 400,
    NotSvg: 400,
    BackendError: 502,
}


def _status_for(exc: EngineError) -> int:
    for klass in type(exc).__mro__:
        if klass in _STATUS:
            return _STATUS[klass]
    return 422


# --- wire parsing ---------------------------------------------------------------


def _require_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadRequest(f"{what} must be an integer")
    return value


def parse_ref(data: Any) -> ObjectRef:
    if not isinstance(data, dict):
        raise BadRequest("a reference must be an object")
    try:
        if "span" in data:
            span = data["span"]
            if not (isinstance(span, list) and len(span) == 2):
                raise BadRequest("span must be [start, end]")
            return TextSpan(_require_int(span[0], "span start"), _require_int(span[1], "span end"))
        if "id" in data:
            if not isinstance(data["id"], str):
                raise BadRequest("element id must be a string")
            return SvgElementId(data["id"])
        if "x" in data or "y" in data:
            return SvgPoint(_require_int(data.get("x"), "x"), _require_int(data.get("y"), "y"))
    except ValueError as exc:
        raise BadRequest(str(exc)) from exc
    raise BadRequest(f"unrecognized reference {data!r}")


def parse_segment(data: Any) -> PromptSegment:
    if not isinstance(data, dict):
        raise BadRequest("a segment must be an object")
    try:
        if "literal" in data:
            if not isinstance(data["literal"], str):
                raise BadRequest("literal must be a string")
            return LiteralText(data["literal"])
        if "objectWord" in data:
            word = data["objectWord"]
            if not isinstance(word, dict) or "ref" not in word:
                raise BadRequest("objectWord needs a ref")
            display = word.get("display")
            if not isinstance(display, str):
                raise BadRequest("objectWord needs a display string")
            return ObjectWord(parse_ref(word["ref"]), display)
    except ValueError as exc:
        raise BadRequest(str(exc)) from exc
    if "slot" in data:
        raise BadRequest("slot segments cannot be submitted")
    raise BadRequest(f"unrecognized segment {data!r}")


def parse_prompt(segments: list[Any]) -> ComposedPrompt:
    try:
        return ComposedPrompt(tuple(parse_segment(s) for s in segments))
    except ValueError as exc:
        raise BadRequest(str(exc)) from exc


def parse_selection(refs: list[Any]) -> Selection:
    return Selection(tuple(parse_ref(r) for r in refs))


# --- wire rendering ---------------------------------------------------------------


def ref_json(ref: ObjectRef) -> dict[str, Any]:
    if isinstance(ref, TextSpan):
        return {"span": [ref.start, ref.end]}
    if isinstance(ref, SvgElementId):
        return {"id": ref.id}
    return {"x": ref.x, "y": ref.y}


def document_json(doc: Document) -> dict[str, Any]:
    return {"kind": doc.kind, "content": doc.content, "version": doc.version}


def changes_json(changes: ChangeSet) -> dict[str, Any]:
    if changes.kind == "text":
        return {
            "kind": "text",
            "spans": [
                {"span": [c.span.start, c.span.end], "kind": c.kind} for c in changes.spans
            ],
        }
    return {
        "kind": "svg",
        "added": sorted(changes.added),
        "removed": sorted(changes.removed),
        "modified": sorted(changes.modified),
    }


def tool_json(tool: Tool) -> dict[str, Any]:
    return {"id": tool.id, "label": tool.label, "kind": tool.kind, "arity": tool.arity}


# --- sessions ---------------------------------------------------------------------


@dataclass
class _Session:
    id: str
    engine: EditSession
    events: list[dict[str, Any]] = field(default_factory=list)

    def log(self, kind: str, summary: str) -> None:
        self.events.append(
            {
                "at": datetime.now(timezone.utc).isoformat(),
                "kind": kind,
                "summary": summary,
            }
        )

    def view(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "document": document_json(self.engine.document),
            "toolbar": [tool_json(t) for t in self.engine.tools],
            "canUndo": self.engine.history.can_undo,
            "canRedo": self.engine.history.can_redo,
            "busy": self.engine.busy,
            "eventLog": list(self.events),
        }

    def result_json(self, result: OperationResult) -> dict[str, Any]:
        return {
            "document": document_json(result.document),
            "changes": changes_json(result.changes),
            "kind": result.kind,
            "label": result.label,
            "createdToolId": result.created_tool_id,
            "targets": [
                {"ref": ref_json(t.ref), "ok": t.ok, "detail": t.detail}
                for t in result.target_status
            ],
            "elapsedMs": round(result.elapsed * 1000, 3),
            "canUndo": self.engine.history.can_undo,
            "canRedo": self.engine.history.can_redo,
        }


class CreateSessionBody(BaseModel):
    kind: str
    content: str


class PromptBody(BaseModel):
    segments: list[Any] = []
    selection: list[Any] = []


class InvokeBody(BaseModel):
    nouns: list[Any] = []


def create_app(
    backend: Backend,
    *,
    model: str = DEFAULT_MODEL,
    temperature: float = 0.0,
    snapshot_dir: str | None = None,
) -> FastAPI:
    """Application over one completion backend; sessions live in memory
    and are optionally snapshotted to ``snapshot_dir`` on shutdown."""

    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()

    def write_snapshots() -> None:
        if snapshot_dir is None:
            return
        target = Path(snapshot_dir)
        target.mkdir(parents=True, exist_ok=True)
        for session in list(sessions.values()):
            (target / f"{session.id}.json").write_text(
                json.dumps(session.view(), indent=2), "utf-8"
            )

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        write_snapshots()

    app = FastAPI(title="directmanip", lifespan=lifespan)
    # the service runs on localhost and carries no credentials, so a
    # browser frontend served from any origin may call it
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(EngineError)
    async def engine_error(_: Request, exc: EngineError) -> JSONResponse:
        return JSONResponse(
            {"error": exc.code, "message": str(exc)}, status_code=_status_for(exc)
        )

    def get_session(session_id: str) -> _Session:
        with registry_lock:
            if session_id not in sessions:
                raise UnknownSession(f"no session {session_id!r}")
            return sessions[session_id]

    def run_cancellable(session: _Session, operation) -> Any:
        # the engine registers the event atomically with its busy flag,
        # so /cancel can always reach the operation actually in flight
        return operation(threading.Event())

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict[str, Any]:
        if body.kind not in ("text", "svg"):
            raise BadRequest("kind must be 'text' or 'svg'")
        engine = EditSession.create(
            body.kind, body.content, backend, model=model, temperature=temperature
        )
        session = _Session(uuid.uuid4().hex, engine)
        session.log("session", f"created {body.kind} session")
        with registry_lock:
            sessions[session.id] = session
        return {"id": session.id, "document": document_json(engine.document)}

    @app.get("/sessions/{session_id}")
    def get_view(session_id: str) -> dict[str, Any]:
        return get_session(session_id).view()

    @app.post("/sessions/{session_id}/prompts")
    def submit_prompt(session_id: str, body: PromptBody) -> dict[str, Any]:
        session = get_session(session_id)
        prompt = parse_prompt(body.segments)
        selection = parse_selection(body.selection)
        try:
            result = run_cancellable(
                session, lambda ev: session.engine.execute(prompt, selection, cancel=ev)
            )
        except EngineError as exc:
            session.log("prompt", f"failed: {exc.code}")
            raise
        session.log("prompt", f"{result.label}: ok")
        return session.result_json(result)

    @app.post("/sessions/{session_id}/preview")
    def preview(session_id: str, body: PromptBody) -> dict[str, Any]:
        session = get_session(session_id)
        prompt = parse_prompt(body.segments)
        selection = parse_selection(body.selection)
        targets = session.engine.preview(prompt, selection)
        return {"targets": [ref_json(t) for t in targets]}

    @app.post("/sessions/{session_id}/tools/{tool_id}/invoke")
    def invoke_tool(session_id: str, tool_id: str, body: InvokeBody) -> dict[str, Any]:
        session = get_session(session_id)
        nouns = tuple(parse_ref(r) for r in body.nouns)
        try:
            result = run_cancellable(
                session, lambda ev: session.engine.invoke_tool(tool_id, nouns, cancel=ev)
            )
        except EngineError as exc:
            session.log("invoke", f"{tool_id} failed: {exc.code}")
            raise
        session.log("invoke", f"{result.label}: ok")
        return session.result_json(result)

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str) -> dict[str, Any]:
        session = get_session(session_id)
        document = session.engine.undo()
        session.log("undo", f"to version {document.version}")
        return {
            "document": document_json(document),
            "canUndo": session.engine.history.can_undo,
            "canRedo": session.engine.history.can_redo,
        }

    @app.post("/sessions/{session_id}/redo")
    def redo(session_id: str) -> dict[str, Any]:
        session = get_session(session_id)
        document = session.engine.redo()
        session.log("redo", f"to version {document.version}")
        return {
            "document": document_json(document),
            "canUndo": session.engine.history.can_undo,
            "canRedo": session.engine.history.can_redo,
        }

    @app.post("/sessions/{session_id}/cancel", status_code=204)
    def cancel(session_id: str) -> Response:
        session = get_session(session_id)
        session.engine.cancel_current()
        session.log("cancel", "requested")
        return Response(status_code=204)

    return app
