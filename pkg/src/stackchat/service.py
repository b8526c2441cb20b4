"""HTTP face of the engine: session creation, turns, and transcripts."""

from __future__ import annotations

import io
import threading

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .errors import OversizeInputError, SessionEndedError
from .session import ConversationState, Engine


class SessionRequest(BaseModel):
    seed: int | None = None


class TurnRequest(BaseModel):
    text: str


class _LiveSession:
    def __init__(self, state: ConversationState):
        self.state = state
        self.lock = threading.Lock()  # turns within a session are serial


def create_app(engine: Engine | None = None) -> FastAPI:
    engine = engine or Engine()
    app = FastAPI(title="stackchat", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, _LiveSession] = {}
    app.state.engine = engine
    app.state.sessions = sessions

    @app.post("/api/sessions")
    def start_session(body: SessionRequest | None = None):
        seed = body.seed if body else None
        state, opening = engine.start_session(seed=seed)
        sessions[state.session_id] = _LiveSession(state)
        return {"session_id": state.session_id, "reply": opening.response_text}

    @app.post("/api/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: TurnRequest):
        live = sessions.get(session_id)
        if live is None:
            raise HTTPException(status_code=404, detail="unknown session")
        if not body.text.strip():
            raise HTTPException(status_code=400, detail="text must be non-empty")
        with live.lock:
            try:
                turn, debug = engine.process_turn(live.state, body.text)
            except SessionEndedError:
                raise HTTPException(status_code=409, detail="session has ended")
            except OversizeInputError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
        return {
            "reply": turn.response_text,
            "source": turn.source,
            "fsm_turn": turn.fsm_turn,
            "ended": live.state.ended,
            "debug": debug.to_dict(),
        }

    @app.get("/api/sessions/{session_id}/transcript")
    def get_transcript(session_id: str):
        live = sessions.get(session_id)
        if live is None:
            raise HTTPException(status_code=404, detail="unknown session")
        buffer = io.StringIO()
        with live.lock:
            engine.persist_transcript(live.state, buffer)
        return PlainTextResponse(buffer.getvalue(), media_type="application/jsonl")

    return app
