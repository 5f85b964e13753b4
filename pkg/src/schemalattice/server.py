"""Session-based HTTP JSON API for the explorer UI.

Sessions live in memory; each one owns a base context plus the ordered ops
applied so far, and the current context is always the deterministic replay
of that history. Mutations are serialized per session and guarded by an
optimistic version token carried in the X-Context-Version header.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import Body, FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .context import FormalContext
from .errors import InvalidOpError, SchemaLatticeError
from .ingest import (
    context_document,
    dump_context_json,
    parse_cxt,
    write_csv_crosstable,
    write_cxt,
)
from .lattice import build_lattice, export_lattice, lattice_document
from .metrics import ContextStats, context_stats, coverage_curve
from .transform import (
    OpOutcome,
    TransformOp,
    TransformReport,
    TransformScript,
    apply_op,
    dump_script,
    op_to_dict,
    parse_op,
    preview,
)

VERSION_HEADER = "X-Context-Version"


class UnknownSessionError(SchemaLatticeError):
    pass


class VersionConflictError(SchemaLatticeError):
    pass


class RejectedOpError(SchemaLatticeError):
    pass


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Session:
    id: str
    base: FormalContext
    ops: list[TransformOp] = field(default_factory=list)
    version: int = 0
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)

    def __post_init__(self) -> None:
        self.lock = threading.Lock()
        self.current: FormalContext = self.base
        self._stats: ContextStats | None = None
        self._lattice = None

    def stats(self) -> ContextStats:
        if self._stats is None:
            self._stats = context_stats(self.current)
        return self._stats

    def lattice(self):
        if self._lattice is None:
            self._lattice = build_lattice(self.current)
        return self._lattice

    def _refresh(self, ctx: FormalContext) -> None:
        self.current = ctx
        self._stats = None
        self._lattice = None
        self.version += 1
        self.updated_at = _now()


class SessionStore:
    """In-memory sessions with an optional append-only journal per session."""

    def __init__(self, journal_dir: str | None = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.journal_dir = Path(journal_dir) if journal_dir else None
        if self.journal_dir:
            self.journal_dir.mkdir(parents=True, exist_ok=True)

    def create(self, ctx: FormalContext, session_id: str | None = None) -> Session:
        session_id = session_id or uuid.uuid4().hex[:12]
        session = Session(id=session_id, base=ctx)
        with self._lock:
            if session_id in self._sessions:
                raise VersionConflictError(f"session {session_id!r} already exists")
            self._sessions[session_id] = session
        if self.journal_dir:
            (self.journal_dir / f"{session_id}.base.cxt").write_text(write_cxt(ctx))
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"unknown session {session_id!r}") from None

    def _journal_append(self, session: Session, entry: dict) -> None:
        if self.journal_dir:
            path = self.journal_dir / f"{session.id}.ops.jsonl"
            with path.open("a") as handle:
                handle.write(json.dumps(entry) + "\n")

    def apply(
        self, session_id: str, op: TransformOp, expected_version: int
    ) -> tuple[TransformReport, Session]:
        session = self.get(session_id)
        with session.lock:
            if expected_version != session.version:
                raise VersionConflictError(
                    f"version {expected_version} is stale (current {session.version})"
                )
            stats_before = session.stats()
            try:
                changed, warnings = apply_op(session.current, op)
            except SchemaLatticeError as exc:
                raise RejectedOpError(str(exc)) from exc
            session.ops.append(op)
            session._refresh(changed)
            report = TransformReport(
                outcomes=(OpOutcome(status="applied", warnings=tuple(warnings)),),
                stats_before=stats_before,
                stats_after=session.stats(),
            )
            self._journal_append(session, op_to_dict(op))
            return report, session

    def undo(self, session_id: str, expected_version: int) -> Session:
        session = self.get(session_id)
        with session.lock:
            if expected_version != session.version:
                raise VersionConflictError(
                    f"version {expected_version} is stale (current {session.version})"
                )
            if not session.ops:
                raise VersionConflictError("nothing to undo")
            session.ops.pop()
            ctx = session.base
            for op in session.ops:
                ctx, _ = apply_op(ctx, op)
            session._refresh(ctx)
            self._journal_append(session, {"undo": True})
            return session

    @classmethod
    def load(cls, journal_dir: str) -> "SessionStore":
        """Rebuild a store by replaying the journals in ``journal_dir``."""
        store = cls(journal_dir=journal_dir)
        for base_path in sorted(store.journal_dir.glob("*.base.cxt")):
            session_id = base_path.name.removesuffix(".base.cxt")
            ctx = parse_cxt(base_path.read_text())
            session = Session(id=session_id, base=ctx)
            ops_path = store.journal_dir / f"{session_id}.ops.jsonl"
            if ops_path.exists():
                for line in ops_path.read_text().splitlines():
                    entry = json.loads(line)
                    if entry.get("undo"):
                        session.ops.pop()
                    else:
                        session.ops.append(parse_op(entry))
            current = ctx
            for op in session.ops:
                current, _ = apply_op(current, op)
            session.current = current
            session.version = len(session.ops)
            store._sessions[session_id] = session
        return store


def create_app(store: SessionStore | None = None, static_dir: str | None = None) -> FastAPI:
    store = store or SessionStore()
    app = FastAPI(title="schemalattice", docs_url=None, redoc_url=None)
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=[VERSION_HEADER],
    )

    @app.exception_handler(UnknownSessionError)
    async def _unknown(request: Request, exc: UnknownSessionError):
        return JSONResponse({"detail": str(exc)}, status_code=404)

    @app.exception_handler(VersionConflictError)
    async def _conflict(request: Request, exc: VersionConflictError):
        return JSONResponse({"detail": str(exc)}, status_code=409)

    @app.exception_handler(RejectedOpError)
    async def _rejected(request: Request, exc: RejectedOpError):
        return JSONResponse({"detail": str(exc)}, status_code=422)

    @app.exception_handler(InvalidOpError)
    async def _invalid(request: Request, exc: InvalidOpError):
        return JSONResponse({"detail": str(exc)}, status_code=400)

    @app.exception_handler(SchemaLatticeError)
    async def _bad_input(request: Request, exc: SchemaLatticeError):
        return JSONResponse({"detail": str(exc)}, status_code=400)

    def _versioned(session: Session, payload, status_code: int = 200) -> JSONResponse:
        return JSONResponse(
            payload,
            status_code=status_code,
            headers={VERSION_HEADER: str(session.version)},
        )

    def _expected_version(request: Request) -> int:
        raw = request.headers.get(VERSION_HEADER)
        if raw is None:
            raise InvalidOpError(f"mutations require the {VERSION_HEADER} header")
        try:
            return int(raw)
        except ValueError:
            raise InvalidOpError(f"bad {VERSION_HEADER} value {raw!r}") from None

    @app.post("/sessions")
    async def create_session(body: dict = Body(...)):
        if not isinstance(body, dict):
            raise InvalidOpError("body must be a JSON object")
        if "cxt" in body:
            ctx = parse_cxt(body["cxt"])
        elif "path" in body:
            try:
                ctx = parse_cxt(Path(body["path"]).read_text())
            except OSError as exc:
                raise InvalidOpError(f"cannot read {body['path']!r}: {exc}") from None
        else:
            raise InvalidOpError("provide 'cxt' text or a server-side 'path'")
        session = store.create(ctx)
        return _versioned(
            session,
            {
                "id": session.id,
                "version": session.version,
                "stats": session.stats().as_dict(),
            },
            status_code=201,
        )

    @app.get("/sessions/{session_id}/context")
    async def get_context(session_id: str):
        session = store.get(session_id)
        return _versioned(session, context_document(session.current))

    @app.get("/sessions/{session_id}/lattice")
    async def get_lattice(session_id: str):
        session = store.get(session_id)
        return _versioned(
            session, lattice_document(session.current, session.lattice())
        )

    @app.get("/sessions/{session_id}/coverage")
    async def get_coverage(session_id: str):
        session = store.get(session_id)
        return _versioned(session, coverage_curve(session.current).as_dict())

    @app.get("/sessions/{session_id}/stats")
    async def get_stats(session_id: str):
        session = store.get(session_id)
        return _versioned(session, session.stats().as_dict())

    @app.get("/sessions/{session_id}/history")
    async def get_history(session_id: str):
        session = store.get(session_id)
        script = TransformScript(
            ops=tuple(session.ops), created_at=session.created_at
        )
        return _versioned(session, json.loads(dump_script(script)))

    @app.get("/sessions/{session_id}/export")
    async def get_export(session_id: str, format: str = "cxt"):
        session = store.get(session_id)
        ctx = session.current
        headers = {VERSION_HEADER: str(session.version)}
        if format == "cxt":
            return PlainTextResponse(write_cxt(ctx), headers=headers)
        if format == "csv":
            return PlainTextResponse(write_csv_crosstable(ctx), headers=headers)
        if format == "json":
            return Response(
                dump_context_json(ctx),
                media_type="application/json",
                headers=headers,
            )
        if format == "dot":
            return PlainTextResponse(
                export_lattice(ctx, session.lattice(), fmt="dot"), headers=headers
            )
        raise InvalidOpError(f"unsupported export format {format!r}")

    @app.post("/sessions/{session_id}/transforms")
    async def post_transform(session_id: str, request: Request, body: dict = Body(...)):
        expected = _expected_version(request)
        op = parse_op(body)
        report, session = store.apply(session_id, op, expected_version=expected)
        return _versioned(
            session,
            {
                "report": report.as_dict(),
                "stats": session.stats().as_dict(),
                "version": session.version,
            },
        )

    @app.post("/sessions/{session_id}/transforms/preview")
    async def post_preview(session_id: str, body: dict = Body(...)):
        session = store.get(session_id)
        op = parse_op(body)
        report, delta = preview(session.current, op)
        return _versioned(
            session,
            {
                "report": report.as_dict(),
                "delta": delta.as_dict() if delta else None,
            },
        )

    @app.post("/sessions/{session_id}/undo")
    async def post_undo(session_id: str, request: Request):
        expected = _expected_version(request)
        session = store.undo(session_id, expected_version=expected)
        return _versioned(
            session,
            {"stats": session.stats().as_dict(), "version": session.version},
        )

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
