"""HTTP session service wrapping the dialog loop.

Endpoints (JSON over HTTP/1.1, versioned under /v1):

* POST /v1/sessions                -> 201 {session_id, greeting}
* POST /v1/sessions/{id}/messages  -> one bot turn per user message
* GET  /v1/sessions/{id}/state     -> diagnostic slot/assumption dump
* GET  /health                     -> {status, movie_count, history_count}

Messages to one session are serialized: a second concurrent post gets 409.
The chat UI bundle, when present, is served statically at /.
"""

from __future__ import annotations

import datetime as dt
import logging
import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import ServiceSettings
from .dialog import BotDeps, BotTurn, DialogSession
from .history import HistoryStore
from .model import EntityType
from .moviedb import MovieStore, ingest
from .nlu import UnderstandingProvider
from .providers import BuiltinProvider, RemoteProvider

logger = logging.getLogger(__name__)


class MessageIn(BaseModel):
    text: str


class _Session:
    __slots__ = ("id", "dialog", "created", "last_active", "lock")

    def __init__(self, session_id: str, dialog: DialogSession) -> None:
        self.id = session_id
        self.dialog = dialog
        self.created = dt.datetime.now(dt.timezone.utc)
        self.last_active = self.created
        self.lock = threading.Lock()


def _turn_json(turn: BotTurn, dialog: DialogSession) -> dict:
    return {
        "kind": turn.kind.value,
        "entity_type": turn.entity_type.key if turn.entity_type else None,
        "utterance": turn.utterance,
        "results": [
            {
                "id": m.id,
                "title": m.title,
                "year": m.release_year,
                "rating": m.quality_rating,
            }
            for m in turn.results
        ],
        "estimates": {t.key: p for t, p in turn.estimates.items()},
        "assumed": {
            t.key: {"skipped": a.skipped, "order": a.order}
            for t, a in dialog.state.assumptions.items()
        },
    }


def create_app(
    settings: Optional[ServiceSettings] = None,
    provider: Optional[UnderstandingProvider] = None,
    history: Optional[HistoryStore] = None,
) -> FastAPI:
    """Build the service; provider/history overrides support tests."""
    cfg = settings or ServiceSettings()
    app = FastAPI(title="slotforge", version="0.1.0")

    store: Optional[MovieStore] = None
    store_error: Optional[str] = None
    try:
        store = ingest(cfg.resolve_movies_path())
    except OSError as exc:
        store_error = str(exc)
        logger.error("movie store failed to load: %s", exc)

    hist = history if history is not None else HistoryStore(cfg.history_dir)
    lexicons = cfg.resolve_lexicons()
    if provider is None:
        if cfg.provider.mode == "remote":
            provider = RemoteProvider(cfg.provider.url, cfg.provider.timeout)
        else:
            known = store.person_names() if store else None
            provider = BuiltinProvider(lexicons, known_people=known)

    sessions: dict[str, _Session] = {}
    sessions_lock = threading.Lock()

    app.state.store = store
    app.state.history = hist
    app.state.sessions = sessions

    def _get_session(session_id: str) -> _Session:
        now = dt.datetime.now(dt.timezone.utc)
        with sessions_lock:
            session = sessions.get(session_id)
            if session is not None:
                age = (now - session.last_active).total_seconds()
                if age > cfg.session_ttl_seconds:
                    del sessions[session_id]
                    session = None
            if session is None:
                raise HTTPException(status_code=404, detail="unknown or expired session")
            return session

    @app.post("/v1/sessions", status_code=201)
    def create_session() -> dict:
        if store is None:
            raise HTTPException(status_code=503, detail=f"movie store unavailable: {store_error}")
        deps = BotDeps(provider=provider, lexicons=lexicons, store=store, history=hist)
        session_id = str(uuid.uuid4())
        dialog = DialogSession(deps, cfg.dialog, user_id=session_id)
        with sessions_lock:
            sessions[session_id] = _Session(session_id, dialog)
        return {"session_id": session_id, "greeting": dialog.greeting()}

    @app.post("/v1/sessions/{session_id}/messages")
    def post_message(session_id: str, message: MessageIn) -> dict:
        if not message.text.strip():
            raise HTTPException(status_code=422, detail="text must be non-empty")
        session = _get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="session is handling another message")
        try:
            turn = session.dialog.step(message.text)
            session.last_active = dt.datetime.now(dt.timezone.utc)
            return _turn_json(turn, session.dialog)
        finally:
            session.lock.release()

    @app.get("/v1/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict:
        session = _get_session(session_id)
        state = session.dialog.state
        return {
            "session_id": session_id,
            "phase": session.dialog.phase.value,
            "last_question": state.last_question.key if state.last_question else None,
            "slots": {
                t.key: {
                    "values": {str(v): s for v, s in state.slot(t).values.items()},
                    "skip_history": list(state.slot(t).skip_history),
                    "order_history": list(state.slot(t).order_history),
                }
                for t in EntityType
            },
            "assumptions": {
                t.key: {"skipped": a.skipped, "order": a.order}
                for t, a in state.assumptions.items()
            },
        }

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok" if store is not None else "degraded",
            "movie_count": store.count if store is not None else 0,
            "history_count": len(hist),
        }

    ui_dir = cfg.ui_dir
    if ui_dir is None:
        default_ui = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if default_ui.is_dir():
            ui_dir = str(default_ui)
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def run(settings: Optional[ServiceSettings] = None) -> None:
    import uvicorn

    cfg = settings or ServiceSettings()
    uvicorn.run(create_app(cfg), host="0.0.0.0", port=cfg.port, log_level="info")
