"""Planner adapters.

A planner only returns proposals; it never parses, generates, simulates, or
writes anything itself.  The orchestrator validates and executes every
proposal.  ScriptedPlanner is the deterministic stand-in used by the test
suite and the default CLI backend; HttpPlanner speaks the outbound JSON
contract for a real LLM service.
"""

from __future__ import annotations

import json
import os
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import httpx

from ..cases import BUILTIN_CASES, builtin_case
from ..casexml import emit_case
from .skills import SkillContext

__all__ = [
    "InputEnvelope",
    "PlannerProposal",
    "ToolChoice",
    "PlannerInterface",
    "ScriptedPlanner",
    "HttpPlanner",
]


@dataclass(frozen=True)
class InputEnvelope:
    """One user request: free text, an opaque image attachment, a case
    document, or any combination (at least one present)."""

    text: str | None = None
    image_ref: str | None = None
    xml_ref: str | None = None

    def __post_init__(self):
        if not (self.text or self.image_ref or self.xml_ref):
            raise ValueError("envelope needs text, an image, or a case document")


@dataclass(frozen=True)
class PlannerProposal:
    xml: str
    rationale: str = ""


@dataclass(frozen=True)
class ToolChoice:
    tool: str
    args: dict
    rationale: str = ""


class PlannerInterface(ABC):
    @abstractmethod
    def propose_case(self, envelope: InputEnvelope, skills: SkillContext) -> PlannerProposal:
        ...

    @abstractmethod
    def revise_case(self, draft_xml: str, user_message: str,
                    skills: SkillContext, error: str | None = None) -> PlannerProposal:
        ...

    @abstractmethod
    def select_tool(self, request: str, descriptors: list[dict],
                    skills: SkillContext, error: str | None = None) -> ToolChoice:
        ...


# keyword -> (tool, args) fallbacks used when a script has no tool rules
_TOOL_KEYWORDS = [
    (("run-off", "runoff", "run out", "runout"),
     ("scalar_series", {"preset": "runout_distance", "kind": "fluid"})),
    (("front",), ("scalar_series", {"preset": "front_position", "kind": "fluid"})),
    (("surge", "height"), ("scalar_series", {"preset": "surge_height", "kind": "fluid"})),
    (("sink",), ("scalar_series", {"preset": "sinking_depth", "kind": "fluid"})),
    (("snapshot", "velocity image", "render", "plot the particles"),
     ("render_snapshot", {"color_by": "speed"})),
]


class ScriptedPlanner(PlannerInterface):
    """Deterministic planner driven by an optional script.

    Script keys (all optional):
      propose:  list of {"case": builtin-name} or {"xml": document}, consumed in order
      revise:   list of the same, consumed in order (default: echo the draft)
      tools:    list of {"match": substring, "tool": name, "args": {...}}
      image_cases: {attachment-basename: builtin-name}
    Without a script, proposals fall back to keyword matching on the
    envelope text and the builtin case names.
    """

    def __init__(self, script: dict | None = None):
        self.script = dict(script or {})
        self._propose_queue = list(self.script.get("propose", ()))
        self._revise_queue = list(self.script.get("revise", ()))
        self._tool_queue = list(self.script.get("tool_sequence", ()))

    @classmethod
    def from_file(cls, path: str) -> "ScriptedPlanner":
        with open(path) as f:
            return cls(json.load(f))

    def _materialize(self, entry: dict) -> PlannerProposal:
        if "xml" in entry:
            return PlannerProposal(xml=entry["xml"], rationale=entry.get("rationale", "scripted"))
        name = entry["case"]
        return PlannerProposal(xml=emit_case(builtin_case(name)),
                               rationale=entry.get("rationale", f"scripted case {name}"))

    def propose_case(self, envelope, skills):
        if self._propose_queue:
            return self._materialize(self._propose_queue.pop(0))
        if envelope.xml_ref:
            return PlannerProposal(xml=envelope.xml_ref,
                                   rationale="user-supplied case document used as base")
        if envelope.image_ref:
            mapping = self.script.get("image_cases", {})
            key = os.path.basename(envelope.image_ref)
            if key in mapping:
                return self._materialize({"case": mapping[key]})
        text = (envelope.text or "").lower()
        for name in BUILTIN_CASES:
            if name in text:
                return self._materialize({"case": name})
        if "dam" in text or "collapse" in text:
            return self._materialize({"case": "c1"})
        return self._materialize({"case": "c1"})

    def revise_case(self, draft_xml, user_message, skills, error=None):
        if self._revise_queue:
            return self._materialize(self._revise_queue.pop(0))
        return PlannerProposal(xml=draft_xml, rationale="no scripted revision; draft kept")

    def select_tool(self, request, descriptors, skills, error=None):
        for rule in self.script.get("tools", ()):
            if rule["match"].lower() in request.lower():
                return ToolChoice(tool=rule["tool"], args=dict(rule.get("args", {})),
                                  rationale=rule.get("rationale", "scripted rule"))
        if self._tool_queue:
            entry = self._tool_queue.pop(0)
            return ToolChoice(tool=entry["tool"], args=dict(entry.get("args", {})),
                              rationale=entry.get("rationale", "scripted sequence"))
        low = request.lower()
        for keys, (tool, args) in _TOOL_KEYWORDS:
            if any(k in low for k in keys):
                group = _extract_group(low)
                out = dict(args)
                if group is not None:
                    out["group"] = group
                return ToolChoice(tool=tool, args=out, rationale=f"keyword match: {keys[0]}")
        return ToolChoice(tool="render_snapshot", args={"color_by": "speed"},
                          rationale="fallback: no rule matched, rendering a snapshot")


def _extract_group(text: str) -> int | None:
    m = re.search(r"group\s+(\d+)", text)
    return int(m.group(1)) if m else None


class HttpPlanner(PlannerInterface):
    """Outbound HTTP client for a real planner backend.

    Contract: POST {endpoint} with a JSON body carrying the call mode, the
    rendered skill context, and the mode-specific payload; the response is
    {"xml": ..., "rationale": ...} for case calls and
    {"tool": ..., "args": {...}, "rationale": ...} for tool selection.
    One retry on transport errors, then the error propagates.
    """

    def __init__(self, endpoint: str, timeout: float = 60.0, client: httpx.Client | None = None):
        self.endpoint = endpoint
        self._client = client or httpx.Client(timeout=timeout)

    def _post(self, payload: dict) -> dict:
        last_exc = None
        for _ in range(2):
            try:
                resp = self._client.post(self.endpoint, json=payload)
                resp.raise_for_status()
                return resp.json()
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                last_exc = exc
        raise last_exc

    def propose_case(self, envelope, skills):
        data = self._post({
            "mode": "propose_case",
            "skills": skills.render(),
            "envelope": {"text": envelope.text, "image_ref": envelope.image_ref,
                         "xml_ref": envelope.xml_ref},
        })
        return PlannerProposal(xml=data["xml"], rationale=data.get("rationale", ""))

    def revise_case(self, draft_xml, user_message, skills, error=None):
        data = self._post({
            "mode": "revise_case",
            "skills": skills.render(),
            "draft": draft_xml,
            "message": user_message,
            "error": error,
        })
        return PlannerProposal(xml=data["xml"], rationale=data.get("rationale", ""))

    def select_tool(self, request, descriptors, skills, error=None):
        data = self._post({
            "mode": "select_tool",
            "skills": skills.render(),
            "request": request,
            "descriptors": descriptors,
            "error": error,
        })
        return ToolChoice(tool=data["tool"], args=data.get("args", {}),
                          rationale=data.get("rationale", ""))
