"""Three-phase session state machine with human-in-the-loop checkpoints.

Phase 1 (Drafting/AwaitingApproval): the planner drafts a case, the
orchestrator parses, generates, validates, and renders a preview; the user
converses, edits, or approves.  Phase 2 (Simulating) is the deterministic
pipeline.  Phase 3 (PostProcessing) answers analysis requests through the
typed tool registry.

Simulation is reachable only through an explicit approve action.  The
transcript is append-only and contains no wall-clock data, so a scripted
session replays byte-for-byte.
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field

from ..casedef import CaseDefinition, validate_semantics
from ..casexml import ParseError, parse_case
from ..frameio import load_run
from ..particles import OverlapError, generate_particles
from ..pipeline import run_pipeline
from ..postproc.registry import ToolError, run_tool, tool_descriptors
from ..postproc.render import render_snapshot
from ..validation import GroundTruthSpec, ValidationReport, check_boundary_thickness, check_interface, validate_all
from .planner import InputEnvelope, PlannerInterface
from .skills import SkillContext, default_skills

__all__ = [
    "Phase", "Action", "Event", "SessionConfig", "Session",
    "start_session", "hitl_turn", "run_phase2", "postproc_request",
]


class Phase(str, enum.Enum):
    DRAFTING = "Drafting"
    AWAITING_APPROVAL = "AwaitingApproval"
    SIMULATING = "Simulating"
    POST_PROCESSING = "PostProcessing"
    REVISING = "Revising"
    CLOSED = "Closed"


@dataclass(frozen=True)
class Action:
    kind: str              # message | direct_edit | approve | restart
    text: str = ""
    xml: str = ""


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    payload: dict


@dataclass
class SessionConfig:
    out_root: str
    hitl_cap: int = 5
    truth: GroundTruthSpec | None = None
    export_formats: tuple[str, ...] = ("csv", "vtk")


class Session:
    """One user session; all mutation goes through the methods below."""

    def __init__(self, session_id: str, planner: PlannerInterface,
                 config: SessionConfig, skills: SkillContext | None = None):
        self.session_id = session_id
        self.planner = planner
        self.config = config
        self.skills = skills or default_skills()
        self.phase = Phase.DRAFTING
        self.envelope: InputEnvelope | None = None
        self.draft_xml: str | None = None
        self.draft_case: CaseDefinition | None = None
        self.validation: ValidationReport | None = None
        self.hitl_rounds = 0
        self.converged = True
        self.transcript: list[Event] = []
        self.run_summary = None
        self._loaded_run = None
        self.on_event = None   # callback(Event), set by the service layer

        self.dir = os.path.join(config.out_root, session_id)
        self.artifacts_dir = os.path.join(self.dir, "artifacts")
        self.run_dir = os.path.join(self.dir, "run")
        os.makedirs(self.artifacts_dir, exist_ok=True)

    # ------------------------------------------------------------- events

    def _emit(self, kind: str, **payload) -> None:
        event = Event(seq=len(self.transcript), kind=kind, payload=payload)
        self.transcript.append(event)
        if self.on_event is not None:
            self.on_event(event)

    def transcript_json(self) -> str:
        return json.dumps(
            [{"seq": e.seq, "kind": e.kind, "payload": e.payload}
             for e in self.transcript],
            indent=1, sort_keys=True)

    def snapshot(self) -> dict:
        return {
            "session_id": self.session_id,
            "phase": self.phase.value,
            "hitl_rounds": self.hitl_rounds,
            "converged": self.converged,
            "has_draft": self.draft_xml is not None,
            "validation_passed": self.validation.passed if self.validation else None,
            "findings": self.validation.to_records() if self.validation else [],
            "n_events": len(self.transcript),
            "artifacts": sorted(os.listdir(self.artifacts_dir)),
        }

    # ------------------------------------------------------------ phase 1

    def start(self, envelope: InputEnvelope) -> "Session":
        if self.envelope is not None:
            raise ValueError("session already started")
        self.envelope = envelope
        self._emit("session_created",
                   text=envelope.text or "",
                   has_image=envelope.image_ref is not None,
                   has_xml=envelope.xml_ref is not None)
        self._propose()
        return self

    def _propose(self) -> None:
        proposal = self.planner.propose_case(self.envelope, self.skills)
        self._emit("draft_proposed", rationale=proposal.rationale)
        self._ingest_draft(proposal.xml, allow_auto_repair=True)

    def _ingest_draft(self, xml: str, allow_auto_repair: bool) -> None:
        """Parse, generate, validate, preview; one automatic repair round on
        a syntax failure before surfacing it."""
        try:
            case = parse_case(xml)
        except ParseError as exc:
            self._emit("parse_failed", category=exc.category, line=exc.line,
                       message=exc.message)
            if allow_auto_repair:
                proposal = self.planner.revise_case(
                    xml, "the document failed to parse; fix the syntax",
                    self.skills, error=str(exc))
                self._emit("draft_repaired", rationale=proposal.rationale)
                self._ingest_draft(proposal.xml, allow_auto_repair=False)
            else:
                self.phase = Phase.DRAFTING
                self._emit("draft_failed", reason="unparseable after repair round")
            return

        self.draft_xml = xml
        self.draft_case = case
        issues = validate_semantics(case)
        if issues:
            self.phase = Phase.AWAITING_APPROVAL
            self.validation = None
            self._emit("semantic_issues", issues=[str(i) for i in issues])
            return

        try:
            frame = generate_particles(case)
        except OverlapError as exc:
            self.phase = Phase.AWAITING_APPROVAL
            self.validation = None
            self._emit("generation_failed", reason=str(exc))
            return

        if self.config.truth is not None:
            self.validation = validate_all(case, frame, self.config.truth)
        else:
            findings = check_interface(frame, case.numerics, GroundTruthSpec(components=()))
            findings += check_boundary_thickness(case, frame, case.numerics)
            self.validation = ValidationReport(findings)

        preview = f"preview_{len(self.transcript):04d}.svg"
        with open(os.path.join(self.artifacts_dir, preview), "w", newline="\n") as f:
            f.write(render_snapshot(frame, color_by="group"))
        self.phase = Phase.AWAITING_APPROVAL
        self._emit("draft_ready",
                   n_particles=frame.n,
                   validation_passed=self.validation.passed,
                   findings=self.validation.to_records(),
                   preview=preview)

    def hitl_turn(self, action: Action) -> "Session":
        if self.phase not in (Phase.AWAITING_APPROVAL, Phase.REVISING, Phase.POST_PROCESSING):
            raise ValueError(f"no interactive turn allowed in phase {self.phase.value}")

        if action.kind == "approve":
            if self.phase != Phase.AWAITING_APPROVAL:
                raise ValueError(f"approve rejected in phase {self.phase.value}")
            if self.draft_case is None:
                raise ValueError("approve rejected: no usable draft")
            self.phase = Phase.SIMULATING
            self._emit("approved", hitl_rounds=self.hitl_rounds)
            return self

        if action.kind == "restart":
            self._emit("restarted")
            self.phase = Phase.DRAFTING
            self.draft_xml = None
            self.draft_case = None
            self.validation = None
            self._propose()
            return self

        if action.kind == "message":
            self.hitl_rounds += 1
            self._emit("user_message", text=action.text, round=self.hitl_rounds)
            proposal = self.planner.revise_case(self.draft_xml or "", action.text, self.skills)
            self._emit("draft_revised", rationale=proposal.rationale)
            self._ingest_draft(proposal.xml, allow_auto_repair=True)
        elif action.kind == "direct_edit":
            self.hitl_rounds += 1
            self._emit("user_edit", round=self.hitl_rounds)
            self._ingest_draft(action.xml, allow_auto_repair=False)
        else:
            raise ValueError(f"unknown action kind {action.kind!r}")

        if self.hitl_rounds > self.config.hitl_cap and self.converged:
            self.converged = False
            self._emit("hitl_cap_exceeded", cap=self.config.hitl_cap)
        return self

    # ------------------------------------------------------------ phase 2

    def run_phase2(self) -> "Session":
        if self.phase != Phase.SIMULATING:
            raise ValueError(f"run_phase2 requires Simulating, was {self.phase.value}")
        self._emit("run_started")

        def progress(fraction: float, sim_time: float) -> None:
            self._emit("run_progress", fraction=round(fraction, 6),
                       time=round(sim_time, 9))

        try:
            summary = run_pipeline(self.draft_case, self.run_dir,
                                   formats=self.config.export_formats,
                                   on_progress=progress)
        except (OverlapError, ValueError) as exc:
            self.phase = Phase.REVISING
            self._emit("run_failed", reason=str(exc))
            return self

        self.run_summary = summary
        if summary.instability_flag:
            self.phase = Phase.REVISING
            self._emit("instability", frames_written=summary.frames_written,
                       final_time=summary.final_time)
        else:
            self.phase = Phase.POST_PROCESSING
            self._emit("run_completed", frames_written=summary.frames_written,
                       final_time=summary.final_time)
        return self

    # ------------------------------------------------------------ phase 3

    def postproc_request(self, text: str) -> "Session":
        if self.phase != Phase.POST_PROCESSING:
            raise ValueError(f"postproc_request requires PostProcessing, was {self.phase.value}")
        self._emit("postproc_request", text=text)
        descriptors = tool_descriptors()
        choice = self.planner.select_tool(text, descriptors, self.skills)
        self._emit("tool_selected", tool=choice.tool, args=choice.args,
                   rationale=choice.rationale)
        if self._loaded_run is None:
            self._loaded_run = load_run(self.run_dir)
        try:
            result = self._execute_tool(choice)
        except ToolError as exc:
            retry = self.planner.select_tool(text, descriptors, self.skills, error=str(exc))
            self._emit("tool_retry", tool=retry.tool, args=retry.args, error=str(exc))
            try:
                result = self._execute_tool(retry)
            except (ToolError, Exception) as exc2:
                self._emit("tool_error", error=str(exc2))
                return self
        except Exception as exc:
            self._emit("tool_error", error=str(exc))
            return self
        self._emit("tool_result", tool=result.tool, artifacts=result.artifacts,
                   summary=result.summary)
        return self

    def _execute_tool(self, choice):
        return run_tool(choice.tool, choice.args, self._loaded_run,
                        self.draft_case, self.artifacts_dir)

    def close(self) -> "Session":
        self.phase = Phase.CLOSED
        self._emit("closed")
        return self


# Spec-facing operation aliases -------------------------------------------

def start_session(planner: PlannerInterface, envelope: InputEnvelope,
                  config: SessionConfig, session_id: str = "session",
                  skills: SkillContext | None = None) -> Session:
    return Session(session_id, planner, config, skills).start(envelope)


def hitl_turn(session: Session, action: Action) -> Session:
    return session.hitl_turn(action)


def run_phase2(session: Session) -> Session:
    return session.run_phase2()


def postproc_request(session: Session, text: str) -> Session:
    return session.postproc_request(text)
