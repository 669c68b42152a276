"""HTTP facade over the audit engine for the ballot-entry UI and the CLI.

Endpoints:
  GET  /audits                  list sessions
  POST /audits                  start an audit (validates, verifies, first draw)
  GET  /audits/{id}             session snapshot
  POST /audits/{id}/mvr         submit one manual vote record
  POST /audits/{id}/draws       extend the sample
  POST /audits/{id}/escalate    operator declares a full hand count
  GET  /audits/{id}/trees       pruned-tree document (TREEDOC,1; ?format=dot)
  GET  /audits/{id}/report      self-contained HTML report

Every mutation is serialized per audit and appended to the session's event
log before the response is built, so responses are always reproducible from
disk.
"""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..audit import AuditError
from ..ballots import ParseError, ValidationError
from ..eventlog import LogIntegrityError
from ..report import render_report
from ..store import Session, SessionStore, StartRefusedError, UnknownAuditError
from ..verification import export_dot, export_treedoc
from .schemas import (AssertionView, AuditListEntry, AuditListResponse, DrawRequest,
                      DrawView, MvrRequest, StartAuditRequest, StatusResponse,
                      none_if_inf)


def _status_response(session: Session) -> StatusResponse:
    engine = session.engine
    state = engine.state()
    draw_views = []
    for d in state.draws:
        entry = state.entries.get(d.ballot_id)
        if entry is None:
            status = "pending"
        elif entry.not_found:
            status = "not_found"
        else:
            status = "entered"
        located = session.locate(d.position)
        draw_views.append(DrawView(
            draw_index=d.draw_index, position=d.position, ballot_id=d.ballot_id,
            phantom=d.phantom, status=status,
            container=located[0] if located else None,
            container_offset=located[1] if located else None,
        ))
    assertion_views = []
    for idx, st in enumerate(state.assertions):
        sa = session.assertion_set.assertions[idx]
        assertion_views.append(AssertionView(
            index=idx, kind=st.assertion.kind, token=st.assertion.token(),
            explanation=st.assertion.explanation(), margin=st.margin,
            mean=f"{st.mean.numerator}/{st.mean.denominator}", mean_value=float(st.mean),
            difficulty=none_if_inf(sa.difficulty),
            p=f"{st.p_value.numerator}/{st.p_value.denominator}", p_value=float(st.p_value),
            confirmed=st.confirmed,
            estimated_additional=none_if_inf(st.estimated_additional),
        ))
    suggestion = engine.suggested_next_draw()
    return StatusResponse(
        audit_id=session.audit_id, status=state.status,
        contest_id=session.contest.contest_id,
        reported_winner=session.contest.reported_winner,
        candidates={c: session.contest.names.get(c, "") for c in session.contest.candidates()},
        risk_limit=str(engine.spec.risk_limit), mode=engine.spec.mode,
        seed=engine.spec.seed, total_cards=engine.spec.total_cards,
        n_records=engine.n_records, filled_prefix=state.filled_prefix,
        suggested_next_draw=none_if_inf(float(suggestion)),
        draws=draw_views, assertions=assertion_views,
        discrepancies=state.discrepancies,
    )


def _assertion_statuses(session: Session) -> list[str]:
    state = session.engine.state()
    return ["confirmed" if st.confirmed else "unconfirmed" for st in state.assertions]


def create_app(state_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    store = SessionStore(state_dir)
    app = FastAPI(title="irvaudit", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    app.state.store = store

    def _get_session(audit_id: str) -> Session:
        try:
            return store.get(audit_id)
        except UnknownAuditError:
            raise HTTPException(status_code=404, detail=f"unknown audit {audit_id!r}")
        except LogIntegrityError as exc:
            raise HTTPException(status_code=500, detail=f"session log failed verification: {exc}")

    @app.get("/audits", response_model=AuditListResponse)
    def list_audits():
        entries = []
        for audit_id in store.list_ids():
            session = _get_session(audit_id)
            entries.append(AuditListEntry(
                audit_id=audit_id, contest_id=session.contest.contest_id,
                status=session.engine.state().status,
            ))
        return AuditListResponse(audits=entries)

    @app.post("/audits", response_model=StatusResponse, status_code=201)
    def start_audit(request: StartAuditRequest):
        try:
            risk_limit = Fraction(str(request.risk_limit))
        except (ValueError, ZeroDivisionError):
            raise HTTPException(status_code=422, detail="risk limit is not a number")
        try:
            session = store.start(
                cvr_text=request.cvr_file, assertion_text=request.assertion_file,
                manifest_text=request.manifest_file, risk_limit=risk_limit,
                mode=request.mode, seed=request.seed,
                error_rate_guess=request.error_rate_guess,
                initial_draw=request.initial_draw,
            )
        except StartRefusedError as exc:
            raise HTTPException(status_code=422,
                                detail={"message": str(exc), "unpruned": exc.unpruned[:50]})
        except (ParseError, ValidationError, AuditError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return _status_response(session)

    @app.get("/audits/{audit_id}", response_model=StatusResponse)
    def audit_status(audit_id: str):
        with store.lock_for(audit_id):
            return _status_response(_get_session(audit_id))

    @app.post("/audits/{audit_id}/mvr", response_model=StatusResponse)
    def submit_mvr(audit_id: str, request: MvrRequest):
        with store.lock_for(audit_id):
            session = _get_session(audit_id)
            try:
                store.submit_mvr(audit_id, request.ballot_id, request.ranking,
                                 request.not_found, request.double_entry_confirmed)
            except AuditError as exc:
                message = str(exc)
                if "was not drawn" in message:
                    raise HTTPException(status_code=404, detail=message)
                if "already entered" in message:
                    raise HTTPException(status_code=409, detail=message)
                raise HTTPException(status_code=422, detail=message)
            return _status_response(session)

    @app.post("/audits/{audit_id}/draws", response_model=StatusResponse)
    def draw_more(audit_id: str, request: DrawRequest):
        with store.lock_for(audit_id):
            _get_session(audit_id)
            try:
                session = store.draw_more(audit_id, request.count)
            except AuditError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            return _status_response(session)

    @app.post("/audits/{audit_id}/escalate", response_model=StatusResponse)
    def escalate(audit_id: str):
        with store.lock_for(audit_id):
            _get_session(audit_id)
            return _status_response(store.escalate(audit_id))

    @app.get("/audits/{audit_id}/trees", response_class=PlainTextResponse)
    def trees(audit_id: str, format: str = "treedoc"):
        with store.lock_for(audit_id):
            session = _get_session(audit_id)
            if format == "dot":
                return export_dot(session.contest, session.assertion_set,
                                  session.verification)
            if format != "treedoc":
                raise HTTPException(status_code=422, detail=f"unknown format {format!r}")
            return export_treedoc(session.contest, session.assertion_set,
                                  session.verification,
                                  assertion_status=_assertion_statuses(session))

    @app.get("/audits/{audit_id}/report", response_class=HTMLResponse)
    def report(audit_id: str):
        with store.lock_for(audit_id):
            session = _get_session(audit_id)
            return render_report(session)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
