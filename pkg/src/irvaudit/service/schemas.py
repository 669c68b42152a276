"""Request/response models for the audit service API (schema `audit-api/1`).

Exact rationals are carried as `num/den` strings next to float conveniences
so clients can display approximations without ever owning the arithmetic.
"""
from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, Field

SCHEMA_VERSION = "audit-api/1"


class StartAuditRequest(BaseModel):
    cvr_file: str = Field(description="canonical record file content")
    assertion_file: str = Field(description="assertion file content")
    manifest_file: str | None = None
    risk_limit: str | float = "0.05"
    mode: Literal["comparison", "polling"] = "comparison"
    seed: str
    error_rate_guess: float = 0.0
    initial_draw: int | None = Field(default=None, ge=0)


class MvrRequest(BaseModel):
    ballot_id: str
    ranking: list[int] | None = None
    not_found: bool = False
    double_entry_confirmed: bool = False


class DrawRequest(BaseModel):
    count: int | None = Field(default=None, ge=1)


class AssertionView(BaseModel):
    index: int
    kind: str
    token: str
    explanation: str
    margin: int
    mean: str
    mean_value: float
    difficulty: float | None
    p: str
    p_value: float
    confirmed: bool
    estimated_additional: float | None


class DrawView(BaseModel):
    draw_index: int
    position: int
    ballot_id: str
    phantom: bool
    status: Literal["pending", "entered", "not_found"]
    container: str | None = None
    container_offset: int | None = None


class StatusResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    audit_id: str
    status: str
    contest_id: str
    reported_winner: int
    candidates: dict[int, str]
    risk_limit: str
    mode: str
    seed: str
    total_cards: int
    n_records: int
    filled_prefix: int
    suggested_next_draw: float | None
    draws: list[DrawView]
    assertions: list[AssertionView]
    discrepancies: list[str]


class AuditListEntry(BaseModel):
    audit_id: str
    contest_id: str
    status: str


class AuditListResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    audits: list[AuditListEntry]


class ErrorResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    message: str
    unpruned: list[str] = []


def none_if_inf(value: float) -> float | None:
    return None if math.isinf(value) else value
