"""Disk-backed audit sessions: input files pinned by digest plus the event log.

A session directory holds the canonical record file, the assertion file, an
optional manifest, and `log.jsonl`. Nothing else is persisted: every
response the service gives is recomputed by replaying the log through the
engine, and a replay cross-checks the logged draw positions against the
seed so a tampered log fails loudly.
"""
from __future__ import annotations

import hashlib
import os
import threading
import uuid
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .assertions import AssertionSet, parse_assertion_text
from .audit import Audit, AuditError, AuditSpec, make_mvr
from .ballots import BallotManifest, Contest, parse_cvr_text, parse_manifest_text
from .eventlog import EventLog, LogIntegrityError
from .tabulation import tabulate
from .verification import VerificationResult, verify_assertion_set

CVR_FILE = "cvrs.csv"
ASSERTION_FILE = "assertions.txt"
MANIFEST_FILE = "manifest.csv"
LOG_FILE = "log.jsonl"


class UnknownAuditError(KeyError):
    pass


class StartRefusedError(ValueError):
    def __init__(self, message: str, unpruned: list[str] | None = None):
        super().__init__(message)
        self.unpruned = unpruned or []


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class Session:
    audit_id: str
    contest: Contest
    assertion_set: AssertionSet
    manifest: BallotManifest | None
    engine: Audit
    verification: VerificationResult
    log: EventLog

    def locate(self, position: int) -> tuple[str, int] | None:
        if self.manifest is None:
            return None
        try:
            return self.manifest.locate(position)
        except ValueError:
            return None


class SessionStore:
    def __init__(self, state_dir: str | os.PathLike):
        self.state_dir = Path(state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def list_ids(self) -> list[str]:
        on_disk = sorted(p.name for p in self.state_dir.iterdir()
                         if p.is_dir() and (p / LOG_FILE).exists())
        return on_disk

    def lock_for(self, audit_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(audit_id, threading.Lock())

    # -- creation -----------------------------------------------------------

    def start(self, cvr_text: str, assertion_text: str, manifest_text: str | None,
              risk_limit: Fraction, mode: str, seed: str,
              error_rate_guess: float = 0.0, initial_draw: int | None = None) -> Session:
        contest, records = parse_cvr_text(cvr_text)
        if contest.reported_winner is None:
            raise StartRefusedError("record file carries no reported winner")
        outcome = tabulate(contest, records)
        if outcome.winner != contest.reported_winner:
            raise StartRefusedError(
                f"records tabulate to {outcome.winner}, not the reported "
                f"winner {contest.reported_winner}"
            )
        aset = parse_assertion_text(assertion_text)
        if aset.contest_id != contest.contest_id:
            raise StartRefusedError("assertion file names a different contest")
        if aset.reported_winner != contest.reported_winner:
            raise StartRefusedError("assertion file names a different winner")
        verification = verify_assertion_set(contest, aset)
        if not verification.certified:
            unpruned = [" <- ".join(map(str, order)) for order in verification.failures]
            raise StartRefusedError(
                f"assertion set leaves {len(unpruned)} elimination orders unpruned",
                unpruned=unpruned,
            )
        manifest = parse_manifest_text(manifest_text) if manifest_text else None
        total_cards = manifest.total_cards if manifest else contest.card_upper_bound
        if manifest and manifest.total_cards < len(records):
            raise StartRefusedError("manifest lists fewer cards than records supplied")

        spec = AuditSpec(contest=contest, assertion_set=aset,
                         risk_limit=Fraction(risk_limit), mode=mode, seed=seed,
                         total_cards=total_cards, error_rate_guess=error_rate_guess)
        engine = Audit(spec, records)
        first_draw = engine.initial_sample_size() if initial_draw is None else initial_draw

        audit_id = uuid.uuid4().hex[:12]
        session_dir = self.state_dir / audit_id
        session_dir.mkdir()
        (session_dir / CVR_FILE).write_text(cvr_text, encoding="utf-8")
        (session_dir / ASSERTION_FILE).write_text(assertion_text, encoding="utf-8")
        if manifest_text:
            (session_dir / MANIFEST_FILE).write_text(manifest_text, encoding="utf-8")
        log = EventLog(session_dir / LOG_FILE)
        log.append({
            "type": "init",
            "audit_id": audit_id,
            "contest_id": contest.contest_id,
            "reported_winner": contest.reported_winner,
            "risk_limit": str(spec.risk_limit),
            "mode": mode,
            "seed": seed,
            "total_cards": total_cards,
            "error_rate_guess": error_rate_guess,
            "n_records": len(records),
            "cvr_sha256": _sha256_text(cvr_text),
            "assertion_sha256": _sha256_text(assertion_text),
            "manifest_sha256": _sha256_text(manifest_text) if manifest_text else None,
        })
        session = Session(audit_id, contest, aset, manifest, engine, verification, log)
        self._append_draw(session, first_draw)
        self._sessions[audit_id] = session
        return session

    def _append_draw(self, session: Session, count: int) -> None:
        if count <= 0:
            return
        new = session.engine.draw(count)
        session.log.append({
            "type": "draw",
            "count": count,
            "start_index": new[0].draw_index,
            "positions": [d.position for d in new],
            "ballot_ids": [d.ballot_id for d in new],
        })

    # -- replay -------------------------------------------------------------

    def get(self, audit_id: str) -> Session:
        session = self._sessions.get(audit_id)
        if session is not None:
            return session
        session = self._load(audit_id)
        self._sessions[audit_id] = session
        return session

    def _load(self, audit_id: str) -> Session:
        session_dir = self.state_dir / audit_id
        log_path = session_dir / LOG_FILE
        if not log_path.exists():
            raise UnknownAuditError(audit_id)
        log = EventLog(log_path)
        events = log.read_all()
        if not events or events[0]["type"] != "init":
            raise LogIntegrityError("log does not start with an init record")
        header = events[0]

        cvr_text = (session_dir / CVR_FILE).read_text(encoding="utf-8")
        assertion_text = (session_dir / ASSERTION_FILE).read_text(encoding="utf-8")
        if _sha256_text(cvr_text) != header["cvr_sha256"]:
            raise LogIntegrityError("record file digest differs from the log header")
        if _sha256_text(assertion_text) != header["assertion_sha256"]:
            raise LogIntegrityError("assertion file digest differs from the log header")
        manifest_text = None
        if header.get("manifest_sha256"):
            manifest_text = (session_dir / MANIFEST_FILE).read_text(encoding="utf-8")
            if _sha256_text(manifest_text) != header["manifest_sha256"]:
                raise LogIntegrityError("manifest digest differs from the log header")

        contest, records = parse_cvr_text(cvr_text)
        aset = parse_assertion_text(assertion_text)
        manifest = parse_manifest_text(manifest_text) if manifest_text else None
        verification = verify_assertion_set(contest, aset)
        spec = AuditSpec(contest=contest, assertion_set=aset,
                         risk_limit=Fraction(header["risk_limit"]), mode=header["mode"],
                         seed=header["seed"], total_cards=header["total_cards"],
                         error_rate_guess=header["error_rate_guess"])
        engine = Audit(spec, records)
        for event in events[1:]:
            kind = event["type"]
            if kind == "draw":
                new = engine.draw(event["count"])
                if [d.position for d in new] != event["positions"]:
                    raise LogIntegrityError("logged draw positions differ from the seed's")
            elif kind == "mvr":
                engine.enter(make_mvr(
                    event["ballot_id"],
                    event["ranking"],
                    not_found=event["not_found"],
                    double_entry_confirmed=event.get("double_entry_confirmed", False),
                ))
            elif kind == "status":
                if event["status"] == "escalate_full_hand_count":
                    engine.escalate()
            else:
                raise LogIntegrityError(f"unknown event type {kind!r}")
        return Session(audit_id, contest, aset, manifest, engine, verification, log)

    # -- mutations ----------------------------------------------------------

    def submit_mvr(self, audit_id: str, ballot_id: str, ranking: list[int] | None,
                   not_found: bool, double_entry_confirmed: bool = False) -> Session:
        session = self.get(audit_id)
        mvr = make_mvr(ballot_id, ranking, not_found=not_found,
                       double_entry_confirmed=double_entry_confirmed)
        session.engine.enter(mvr)
        session.log.append({
            "type": "mvr",
            "ballot_id": ballot_id,
            "ranking": None if mvr.ranking is None else list(mvr.ranking),
            "not_found": not_found,
            "double_entry_confirmed": double_entry_confirmed,
        })
        return session

    def draw_more(self, audit_id: str, count: int | None) -> Session:
        session = self.get(audit_id)
        if count is None:
            suggestion = session.engine.suggested_next_draw()
            if suggestion in (0, float("inf")):
                raise AuditError(
                    "no finite draw suggestion (audit complete or unconfirmable); "
                    "pass an explicit count"
                )
            count = int(suggestion)
        self._append_draw(session, count)
        return session

    def escalate(self, audit_id: str) -> Session:
        session = self.get(audit_id)
        session.engine.escalate()
        session.log.append({"type": "status", "status": "escalate_full_hand_count"})
        return session
