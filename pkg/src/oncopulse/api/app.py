"""HTTP boundary: wires the store, model, dialogue, and summarizer together.

All state lives on ``app.state``: one Store, one immutable loaded model (or
None when degraded), and the per-patient open check-in sessions.
"""

from __future__ import annotations

import logging
import threading
import time
import uuid
from pathlib import Path

from fastapi import APIRouter, Depends, FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.security.utils import get_authorization_scheme_param

from ..dialogue import CheckInSession
from ..errors import (
    NotFoundError,
    OncopulseError,
    QueryError,
    ValidationError,
)
from ..records import METRICS, Note, SeriesQuery, utc_date
from ..store import Store
from ..summary import baselines_from_store, build_daily_summary
from . import schemas
from .config import ApiConfig

log = logging.getLogger("oncopulse.api")

API_PREFIX = "/api/v1"


def _now_ms() -> int:
    return int(time.time() * 1000)


def load_model(path: str | Path | None):
    """Load the risk model, or return None to run degraded."""
    if path is None:
        return None
    try:
        from ..model import RiskModel

        return RiskModel.load(path)
    except FileNotFoundError:
        log.warning("model file missing: %s; risk scoring unavailable", path)
        return None
    except OncopulseError as exc:
        log.warning("model unloadable (%s); risk scoring unavailable", exc)
        return None


def _turn_out(turn) -> dict:
    return {
        "turn_id": turn.turn_id,
        "session_id": turn.session_id,
        "patient_id": turn.patient_id,
        "speaker": turn.speaker,
        "t": turn.t,
        "text": turn.text,
        "extracted": [
            {"symptom": e.symptom, "negated": e.negated, "severity_words": list(e.severity_words)}
            for e in turn.extracted
        ],
        "tag": turn.tag,
    }


def _alert_out(alert) -> dict:
    return alert.to_dict()


def create_app(config: ApiConfig, store: Store | None = None, model=...) -> FastAPI:
    app = FastAPI(title="oncopulse", openapi_url=f"{API_PREFIX}/openapi.json")
    app.state.config = config
    app.state.store = store if store is not None else Store(config.data_dir)
    app.state.model = load_model(config.model_path) if model is ... else model
    app.state.sessions = {}
    app.state.sessions_lock = threading.Lock()

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["Authorization", "Content-Type"],
        )

    # -- error mapping ------------------------------------------------------

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(ValidationError)
    async def _bad_record(request: Request, exc: ValidationError):
        return JSONResponse(
            status_code=400, content={"detail": str(exc), "fields": exc.fields}
        )

    @app.exception_handler(QueryError)
    async def _bad_query(request: Request, exc: QueryError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "fields": []})

    @app.exception_handler(RequestValidationError)
    async def _bad_body(request: Request, exc: RequestValidationError):
        fields = [".".join(str(p) for p in err["loc"]) for err in exc.errors()]
        return JSONResponse(
            status_code=400,
            content={"detail": "request failed schema validation", "fields": fields},
        )

    # -- auth -----------------------------------------------------------------

    async def require_token(request: Request) -> None:
        token = config.auth_token
        if token is None:
            return
        scheme, credential = get_authorization_scheme_param(
            request.headers.get("Authorization", "")
        )
        if scheme.lower() != "bearer" or credential != token:
            raise HTTPException(status_code=401, detail="missing or bad bearer token")

    public = APIRouter(prefix=API_PREFIX)
    guarded = APIRouter(prefix=API_PREFIX, dependencies=[Depends(require_token)])

    # -- endpoints ------------------------------------------------------------

    @public.get("/health", response_model=schemas.HealthResponse)
    def health():
        store_state = "ok"
        try:
            app.state.store.list_patients()
        except OSError:
            store_state = "unavailable"
        components = {
            "store": store_state,
            "risk_model": "ok" if app.state.model is not None else "unavailable",
            "api": "ok",
        }
        status = "ok" if all(v == "ok" for v in components.values()) else "degraded"
        return {
            "status": status,
            "components": components,
            "poll_seconds": config.poll_seconds,
        }

    @guarded.get("/patients", response_model=schemas.PatientListResponse)
    def patients():
        return {"patients": [r.to_dict() for r in app.state.store.list_patients()]}

    @guarded.get("/patients/{patient_id}", response_model=schemas.PatientOut)
    def patient(patient_id: str):
        return app.state.store.get_patient(patient_id).to_dict()

    @guarded.get("/patients/{patient_id}/vitals", response_model=schemas.VitalsResponse)
    def vitals(
        patient_id: str,
        metric: str,
        t_from: int = Query(alias="from"),
        t_to: int = Query(alias="to"),
        resolution: str = "raw",
    ):
        if metric not in METRICS:
            raise QueryError(f"unknown metric: {metric!r}")
        rows = app.state.store.query_series(
            SeriesQuery(patient_id, metric, t_from, t_to, resolution)
        )
        payload = {"patient_id": patient_id, "metric": metric, "resolution": resolution}
        if resolution == "raw":
            payload["samples"] = [{"t": s.t, "v": s.value} for s in rows]
        else:
            payload["buckets"] = [b.to_dict() for b in rows]
        return payload

    @guarded.get("/patients/{patient_id}/risk", response_model=schemas.RiskPanelResponse)
    def risk(patient_id: str):
        rows = app.state.store.list_assessments(patient_id)
        latest = rows[-1].to_dict() if rows else None
        return {
            "patient_id": patient_id,
            "model_state": "ok" if app.state.model is not None else "unavailable",
            "latest": latest,
            "trend": [{"t": a.t, "score": a.score} for a in rows],
        }

    @guarded.get(
        "/patients/{patient_id}/conversations",
        response_model=schemas.ConversationsResponse,
    )
    def conversations(patient_id: str, date: str | None = None):
        turns = app.state.store.list_turns(patient_id, date)
        return {
            "patient_id": patient_id,
            "date": date,
            "turns": [_turn_out(t) for t in turns],
        }

    @guarded.get("/patients/{patient_id}/summary", response_model=schemas.SummaryResponse)
    def summary(patient_id: str, date: str):
        store = app.state.store
        built = store.get_summary(patient_id, date)
        if built is None:
            built = build_daily_summary(
                patient_id, date, store, baselines_from_store(store, patient_id)
            )
            store.save_summary(built)
        return built.to_dict()

    @guarded.get("/patients/{patient_id}/alerts", response_model=schemas.AlertsResponse)
    def alerts(
        patient_id: str,
        t_from: int | None = Query(default=None, alias="from"),
        t_to: int | None = Query(default=None, alias="to"),
    ):
        rows = app.state.store.list_alerts(patient_id, t_from, t_to)
        return {"patient_id": patient_id, "alerts": [_alert_out(a) for a in rows]}

    @guarded.post("/patients/{patient_id}/notes", response_model=schemas.NoteOut, status_code=201)
    def add_note(patient_id: str, body: schemas.NoteIn):
        t = body.t if body.t is not None else _now_ms()
        note = Note(
            note_id=f"nt-{uuid.uuid4().hex[:12]}",
            patient_id=patient_id,
            author=body.author,
            t=t,
            text=body.text,
        )
        store = app.state.store
        store.append_note(note)
        # a summary materialized before this note would never show it;
        # rebuild so the note's date reflects it on the next read
        note_date = utc_date(t)
        if store.get_summary(patient_id, note_date) is not None:
            store.save_summary(build_daily_summary(
                patient_id, note_date, store, baselines_from_store(store, patient_id)
            ))
        return note.to_dict()

    @guarded.post("/ingest/vitals", response_model=schemas.IngestResponse)
    def ingest(body: schemas.IngestRequest):
        receipt = app.state.store.ingest_vitals(body.model_dump())
        return receipt.to_dict()

    @guarded.post(
        "/patients/{patient_id}/conversation/turn",
        response_model=schemas.TurnPostResponse,
    )
    def conversation_turn(patient_id: str, body: schemas.TurnIn):
        store = app.state.store
        store.get_patient(patient_id)  # 404 before touching session state
        t = body.t if body.t is not None else _now_ms()
        with app.state.sessions_lock:
            session = app.state.sessions.get(patient_id)
            new_turns = []
            if session is None or session.closed:
                session = CheckInSession(store, patient_id, t0=t - 1_000)
                app.state.sessions[patient_id] = session
                new_turns.append(session.start())
            n_alerts_before = len(session.alerts)
            new_turns.extend(session.reply(body.text, t=t))
            new_alerts = session.alerts[n_alerts_before:]
            if session.closed:
                app.state.sessions.pop(patient_id, None)
        return {
            "session_id": session.session_id,
            "closed": session.closed,
            "turns": [_turn_out(turn) for turn in new_turns],
            "alerts": [_alert_out(a) for a in new_alerts],
        }

    app.include_router(public)
    app.include_router(guarded)
    return app
