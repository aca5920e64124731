"""HTTP server for separation-game sessions and analysis queries.

Session endpoints drive a human-versus-engine game: the server owns the
authoritative :class:`~flipcalc.game.GameState`, applies the human's moves,
answers with the engine's reply (computed by the optimal-move advisers,
falling back to the lowest-id legal move when the adviser runs out of
budget), and decorates every response with per-arena-vertex ball sizes so a
client can display why the arena shrinks.  The analyze endpoint wraps the
stateless ball / flip-distance queries and a what-if move preview.

Error mapping: malformed payloads are 400, unknown sessions 404, wrong-turn
or game-over moves 409, vertices that violate the game rules 422, and
exhausted enumeration budgets 503.  Mutation is serialized per session; the
session store itself is guarded by its own lock, so distinct sessions never
interact.
"""

from __future__ import annotations

import math
import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from .core import FiniteStructure
from .errors import BudgetExceeded, DomainError, FormatError
from .game import (
    GameState,
    connector_move,
    game_new,
    optimal_connector_move,
    optimal_separator_move,
    separator_move,
)
from .independence import flip_dist, separation_ball
from .io import structure_from_json, structure_to_json

__all__ = ["create_app"]

ROLES = ("connector", "separator")

# Turn-order violations map to 409; everything else a move can trip over
# (vertex outside the arena / universe) is an unprocessable move, 422.
_TURN_MARKERS = ("game is over", "separator to move", "connector to move")


def domain_error_status(message: str) -> int:
    if any(marker in message for marker in _TURN_MARKERS):
        return 409
    return 422


class NewSessionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    op: Optional[str] = None
    structure: dict
    r: int
    human: str = "connector"
    budget_bits: Optional[int] = None


class MoveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    op: Optional[str] = None
    session: Optional[str] = None
    vertex: int


class AnalyzeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    op: str
    structure: Optional[dict] = None
    S: Optional[list] = None
    r: Optional[int] = None
    vertex: Optional[int] = None
    u: Optional[int] = None
    v: Optional[int] = None
    r_max: Optional[int] = None
    session: Optional[str] = None
    budget_bits: Optional[int] = None


@dataclass
class _SessionRecord:
    sid: str
    structure: FiniteStructure
    human: str
    state: GameState
    budget_bits: Optional[int] = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def engine(self) -> str:
        return "separator" if self.human == "connector" else "connector"


def state_payload(state: GameState) -> dict:
    return {
        "r": state.r,
        "round": state.round_number,
        "arena": sorted(state.arena),
        "separator_set": sorted(state.separator_set),
        "history": [list(pair) for pair in state.history],
        "pending_connector": state.pending_connector,
        "status": state.status,
        "awaiting": state.awaiting,
        "finished": state.finished,
    }


def ball_annotations(structure: FiniteStructure, state: GameState, budget_bits) -> dict:
    """Per-arena-vertex size of ball ∩ arena: the arena Connector would keep
    by picking that vertex (equivalently, how entangled it still is)."""
    balls = {}
    try:
        for v in sorted(state.arena):
            ball = separation_ball(structure, state.separator_set, state.r, v, budget_bits)
            balls[str(v)] = len(ball & state.arena)
    except BudgetExceeded:
        return {"balls": {}, "note": "ball annotations unavailable within budget"}
    return {"balls": balls}


def _fallback_move(state: GameState, role: str) -> int:
    if role == "connector":
        return min(state.arena)
    outside = [v for v in range(state.structure.universe_size) if v not in state.separator_set]
    return outside[0] if outside else 0


def engine_turns(state: GameState, role: str):
    """Advance through every consecutive turn owned by `role`, returning the
    new state and the move dicts played.  Adviser budget blowups degrade to
    the lowest-id legal move; budget blowups while *applying* a move
    propagate (the caller turns them into 503 without committing)."""
    moves = []
    while not state.finished and state.awaiting == role:
        adviser = optimal_connector_move if role == "connector" else optimal_separator_move
        try:
            advice = adviser(state)
            vertex, bound, exact = advice.move, advice.bound, advice.exact
        except BudgetExceeded:
            vertex, bound, exact = _fallback_move(state, role), None, False
        apply = connector_move if role == "connector" else separator_move
        state = apply(state, vertex)
        moves.append({"role": role, "vertex": vertex, "bound": bound, "exact": exact})
    return state, moves


def create_app(static_dir=None) -> FastAPI:
    """Build the service; `static_dir`, when given, is mounted at `/` after
    the API routes so a UI bundle can be hosted from the same process."""
    app = FastAPI(title="flipcalc", docs_url=None, redoc_url=None)
    sessions: dict = {}
    store_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def _validation_to_400(request, exc):  # pragma: no cover - thin shim
        errors = [
            {"loc": list(e.get("loc", ())), "msg": str(e.get("msg", "")), "type": e.get("type", "")}
            for e in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": "malformed payload", "errors": errors})

    def _lookup(sid: Optional[str]) -> _SessionRecord:
        if not sid:
            raise HTTPException(status_code=400, detail="missing session id")
        with store_lock:
            rec = sessions.get(sid)
        if rec is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        return rec

    def _parse_structure(data) -> FiniteStructure:
        if data is None:
            raise HTTPException(status_code=400, detail="missing field 'structure'")
        try:
            return structure_from_json(data)
        except FormatError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    def _session_body(rec: _SessionRecord, *, structure: bool = False) -> dict:
        body = {
            "session": rec.sid,
            "human": rec.human,
            "state": state_payload(rec.state),
            "annotations": ball_annotations(rec.structure, rec.state, rec.budget_bits),
        }
        if structure:
            body["structure"] = structure_to_json(rec.structure)
        return body

    @app.post("/api/session")
    def new_session(req: NewSessionRequest):
        if req.op not in (None, "new"):
            raise HTTPException(status_code=400, detail=f"unexpected op {req.op!r} for this endpoint")
        if req.human not in ROLES:
            raise HTTPException(status_code=400, detail=f"human must be one of {ROLES}")
        structure = _parse_structure(req.structure)
        try:
            state = game_new(structure, req.r, budget_bits=req.budget_bits)
        except DomainError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        rec = _SessionRecord(
            sid=uuid.uuid4().hex[:12],
            structure=structure,
            human=req.human,
            state=state,
            budget_bits=req.budget_bits,
        )
        try:
            rec.state, engine_moves = engine_turns(rec.state, rec.engine)
        except BudgetExceeded as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        with store_lock:
            sessions[rec.sid] = rec
        body = _session_body(rec, structure=True)
        body["engine_move"] = engine_moves[-1] if engine_moves else None
        return body

    @app.get("/api/session/{sid}")
    def get_session(sid: str):
        rec = _lookup(sid)
        with rec.lock:
            return _session_body(rec, structure=True)

    @app.post("/api/session/{sid}/move")
    def play_move(sid: str, req: MoveRequest):
        if req.op not in (None, "move"):
            raise HTTPException(status_code=400, detail=f"unexpected op {req.op!r} for this endpoint")
        rec = _lookup(sid)
        if req.session is not None and req.session != sid:
            raise HTTPException(
                status_code=400, detail="session in body does not match session in path"
            )
        with rec.lock:
            state = rec.state
            if state.finished:
                raise HTTPException(status_code=409, detail="game is over")
            if state.awaiting != rec.human:
                raise HTTPException(
                    status_code=409, detail=f"not your turn: {state.awaiting} to move"
                )
            apply = connector_move if rec.human == "connector" else separator_move
            try:
                after_move = apply(state, req.vertex)
                final, engine_moves = engine_turns(after_move, rec.engine)
            except BudgetExceeded as exc:
                raise HTTPException(status_code=503, detail=str(exc))
            except DomainError as exc:
                raise HTTPException(status_code=domain_error_status(str(exc)), detail=str(exc))
            rec.state = final
            body = _session_body(rec)
            body["after_move"] = state_payload(after_move)
            body["engine_move"] = engine_moves[-1] if engine_moves else None
            return body

    def _require(req: AnalyzeRequest, *names: str):
        for name in names:
            if getattr(req, name) is None:
                raise HTTPException(
                    status_code=400, detail=f"op {req.op!r} requires field {name!r}"
                )

    @app.post("/api/analyze")
    def analyze(req: AnalyzeRequest):
        if req.op == "ball":
            _require(req, "structure", "r", "vertex")
            structure = _parse_structure(req.structure)
            S = req.S or ()
            try:
                ball = separation_ball(structure, S, req.r, req.vertex, req.budget_bits)
            except BudgetExceeded as exc:
                raise HTTPException(status_code=503, detail=str(exc))
            except DomainError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            return {
                "op": "ball",
                "vertex": req.vertex,
                "r": req.r,
                "S": sorted(S),
                "ball": sorted(ball),
                "size": len(ball),
            }
        if req.op == "flipdist":
            _require(req, "structure", "u", "v")
            structure = _parse_structure(req.structure)
            S = req.S or ()
            try:
                d = flip_dist(
                    structure, S, req.u, req.v, r_max=req.r_max, budget_bits=req.budget_bits
                )
            except BudgetExceeded as exc:
                raise HTTPException(status_code=503, detail=str(exc))
            except DomainError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            infinite = d == math.inf
            return {
                "op": "flipdist",
                "u": req.u,
                "v": req.v,
                "S": sorted(S),
                "distance": None if infinite else int(d),
                "infinite": infinite,
            }
        if req.op == "preview_move":
            _require(req, "session", "vertex")
            rec = _lookup(req.session)
            with rec.lock:
                state = rec.state
                if state.finished:
                    raise HTTPException(status_code=409, detail="game is over")
                role = state.awaiting
                apply = connector_move if role == "connector" else separator_move
                try:
                    preview = apply(state, req.vertex)
                except BudgetExceeded as exc:
                    raise HTTPException(status_code=503, detail=str(exc))
                except DomainError as exc:
                    raise HTTPException(
                        status_code=domain_error_status(str(exc)), detail=str(exc)
                    )
                return {
                    "op": "preview_move",
                    "session": rec.sid,
                    "vertex": req.vertex,
                    "role": role,
                    "state": state_payload(preview),
                    "annotations": ball_annotations(rec.structure, preview, rec.budget_bits),
                }
        raise HTTPException(status_code=400, detail=f"unknown analyze op {req.op!r}")

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
