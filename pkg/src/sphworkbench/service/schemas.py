"""Request/response bodies for the session service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class CreateSessionRequest(BaseModel):
    text: Optional[str] = Field(None, description="natural-language scenario description")
    image_ref: Optional[str] = Field(None, description="opaque attachment reference")
    xml: Optional[str] = Field(None, description="case document used as the base draft")
    benchmark: Optional[str] = Field(
        None, description="builtin benchmark name (c1..c5); enables ground-truth validation")


class SessionSnapshot(BaseModel):
    session_id: str
    phase: str
    hitl_rounds: int
    converged: bool
    has_draft: bool
    validation_passed: Optional[bool]
    findings: list[dict]
    n_events: int
    artifacts: list[str]


class ActionRequest(BaseModel):
    kind: str = Field(description="message | direct_edit | approve | restart")
    text: str = ""
    xml: str = ""


class PostprocRequest(BaseModel):
    text: str


class EventModel(BaseModel):
    seq: int
    kind: str
    payload: dict[str, Any]


class ErrorResponse(BaseModel):
    detail: str
