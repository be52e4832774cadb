"""Pre-processing failure detection against a ground-truth reference.

Failure codes:
  F1  wrong dimensions          F2  fluid-boundary interface inconsistency
  F3  boundary too thin         F4  coordinate transformation error
  F5  document syntax error     F6  structural composition error

F1 compares declared case extents against the truth, never generated
particle layouts, so apparent offsets caused by interface placement or wall
thickness stay attributed to F2/F3.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .casedef import (
    CaseDefinition,
    Frame,
    GeometryPrimitive,
    NumericalSpec,
    required_boundary_layers,
)
from .casexml import ParseError
from .particles import KIND_BOUNDARY, KIND_FLUID, ParticleFrame, rotation_matrix

__all__ = [
    "ComponentTruth",
    "GroundTruthSpec",
    "Finding",
    "ValidationReport",
    "check_dimensions",
    "check_interface",
    "check_boundary_thickness",
    "check_frames",
    "check_structure",
    "validate_all",
]

PENETRATION_FACTOR = 0.5   # fluid within 0.5*dp of a wall particle
GAP_FACTOR = 2.0           # declared-contact wall farther than 2*dp
ROT_TOL_DEG = 1.0


@dataclass(frozen=True)
class ComponentTruth:
    kind: str
    role: str
    group_id: int
    extents: tuple[float, float, float]
    origin: tuple[float, float, float]
    rotations: tuple[tuple[str, float], ...] = ()
    tol_m: float = 0.01
    rot_tol_deg: float = ROT_TOL_DEG

    @property
    def frame(self) -> Frame:
        return Frame(origin=self.origin, rotations=self.rotations)


@dataclass(frozen=True)
class GroundTruthSpec:
    """Expected component set, dimensions, and frames for one benchmark case.

    `contact` lists (fluid_group, wall_group) pairs the sketch shows touching;
    the gap half of the interface check applies only to those walls.
    """

    components: tuple[ComponentTruth, ...]
    contact: tuple[tuple[int, int], ...] = ()
    notes: str = ""

    @classmethod
    def from_case(cls, case: CaseDefinition, tol_m: float = 0.01,
                  contact: tuple[tuple[int, int], ...] = (),
                  notes: str = "") -> "GroundTruthSpec":
        comps = tuple(
            ComponentTruth(
                kind=p.kind, role=p.role, group_id=p.group_id,
                extents=p.extents, origin=p.local_frame.origin,
                rotations=p.local_frame.rotations, tol_m=tol_m)
            for p in case.primitives)
        return cls(components=comps, contact=tuple(contact), notes=notes)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GroundTruthSpec":
        raw = json.loads(text)
        comps = tuple(
            ComponentTruth(
                kind=c["kind"], role=c["role"], group_id=c["group_id"],
                extents=tuple(c["extents"]), origin=tuple(c["origin"]),
                rotations=tuple((a, float(ang)) for a, ang in c.get("rotations", ())),
                tol_m=c.get("tol_m", 0.01),
                rot_tol_deg=c.get("rot_tol_deg", ROT_TOL_DEG))
            for c in raw["components"])
        contact = tuple((int(a), int(b)) for a, b in raw.get("contact", ()))
        return cls(components=comps, contact=contact, notes=raw.get("notes", ""))


@dataclass(frozen=True)
class Finding:
    mode: str        # F1..F6
    component: str
    evidence: str
    severity: str = "error"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.findings

    @property
    def modes(self) -> set[str]:
        return {f.mode for f in self.findings}

    def to_text(self) -> str:
        if self.passed:
            return "PASS: no findings\n"
        lines = [f"{f.mode} {f.severity} {f.component}: {f.evidence}" for f in self.findings]
        return "\n".join(lines) + "\n"

    def to_records(self) -> list[dict]:
        return [asdict(f) for f in self.findings]


def _matched(case: CaseDefinition, truth: GroundTruthSpec):
    """Components with identical (kind, role, group_id) in both case and truth."""
    by_group = {p.group_id: p for p in case.primitives}
    for comp in truth.components:
        prim = by_group.get(comp.group_id)
        if prim is not None and prim.kind == comp.kind and prim.role == comp.role:
            yield comp, prim


def check_dimensions(case: CaseDefinition, truth: GroundTruthSpec) -> list[Finding]:
    """F1: declared extents outside tolerance, per active axis."""
    findings = []
    active = (0, 2) if case.dimensionality == 2 else (0, 1, 2)
    for comp, prim in _matched(case, truth):
        for ax in active:
            expected, actual = comp.extents[ax], prim.extents[ax]
            if abs(expected - actual) > comp.tol_m:
                findings.append(Finding(
                    "F1", f"{comp.kind}[group={comp.group_id}]",
                    f"extent {'xyz'[ax]} = {actual:.6g} m, expected {expected:.6g} "
                    f"+/- {comp.tol_m:g} m (delta {actual - expected:+.6g} m)"))
    return findings


def check_interface(frame: ParticleFrame, numerics: NumericalSpec,
                    truth: GroundTruthSpec) -> list[Finding]:
    """F2: fluid penetrating a wall, or a spurious gap at a declared-contact wall."""
    findings = []
    dp = numerics.dp
    fluid = frame.kind == KIND_FLUID
    wall = frame.kind == KIND_BOUNDARY
    if not fluid.any() or not wall.any():
        return findings

    wall_tree = cKDTree(frame.pos[wall])
    dist, _ = wall_tree.query(frame.pos[fluid], k=1)
    worst = float(dist.min())
    if worst < PENETRATION_FACTOR * dp:
        gid = int(frame.group[fluid][int(np.argmin(dist))])
        findings.append(Finding(
            "F2", f"fluid[group={gid}]",
            f"penetration: fluid particle {worst:.6g} m from a wall particle "
            f"(threshold {PENETRATION_FACTOR * dp:.6g} m)"))

    for fluid_group, wall_group in truth.contact:
        fsel = fluid & (frame.group == fluid_group)
        wsel = wall & (frame.group == wall_group)
        if not fsel.any() or not wsel.any():
            continue
        tree = cKDTree(frame.pos[wsel])
        d, _ = tree.query(frame.pos[fsel], k=1)
        nearest = float(d.min())
        if nearest > GAP_FACTOR * dp:
            findings.append(Finding(
                "F2", f"fluid[group={fluid_group}]~wall[group={wall_group}]",
                f"gap: declared-contact wall is {nearest:.6g} m away "
                f"(threshold {GAP_FACTOR * dp:.6g} m)"))
    return findings


def _wall_normal(prim: GeometryPrimitive, dim: int) -> np.ndarray:
    active = (0, 2) if dim == 2 else (0, 1, 2)
    if prim.kind == "plane_wall":
        axis = next(ax for ax in active if prim.extents[ax] == 0.0)
    else:
        axis = min((ax for ax in active if prim.extents[ax] > 0.0),
                   key=lambda ax: prim.extents[ax])
    n_local = np.zeros(3)
    n_local[axis] = 1.0
    return rotation_matrix(prim.local_frame) @ n_local


def check_boundary_thickness(case: CaseDefinition, frame: ParticleFrame,
                             numerics: NumericalSpec) -> list[Finding]:
    """F3: measured particle rows along the wall normal below the kernel-support minimum."""
    findings = []
    required = required_boundary_layers(numerics, case.dimensionality)
    for prim in case.primitives:
        if prim.role != "fixed_boundary":
            continue
        sel = frame.group == prim.group_id
        if not sel.any():
            continue
        normal = _wall_normal(prim, case.dimensionality)
        t = frame.pos[sel] @ normal
        measured = int(round((float(t.max()) - float(t.min())) / numerics.dp)) + 1
        if measured < required:
            findings.append(Finding(
                "F3", f"{prim.kind}[group={prim.group_id}]",
                f"boundary is {measured} particle row(s) thick, "
                f"kernel support needs {required}"))
    return findings


def check_frames(case: CaseDefinition, truth: GroundTruthSpec) -> list[Finding]:
    """F4: local frame rotated or translated away from the truth placement."""
    findings = []
    for comp, prim in _matched(case, truth):
        path = f"{comp.kind}[group={comp.group_id}]"
        shift = float(np.linalg.norm(
            np.asarray(prim.local_frame.origin) - np.asarray(comp.origin)))
        if shift > comp.tol_m:
            findings.append(Finding(
                "F4", path, f"frame origin off by {shift:.6g} m (tol {comp.tol_m:g} m)"))
        r_rel = rotation_matrix(comp.frame).T @ rotation_matrix(prim.local_frame)
        angle = math.degrees(math.acos(max(-1.0, min(1.0, (float(np.trace(r_rel)) - 1.0) / 2.0))))
        if angle > comp.rot_tol_deg:
            findings.append(Finding(
                "F4", path,
                f"frame rotated {angle:.3g} deg away from truth (tol {comp.rot_tol_deg:g} deg)"))
    return findings


def check_structure(case: CaseDefinition, truth: GroundTruthSpec) -> list[Finding]:
    """F6: missing, extra, or wrong-type components (matched by group id)."""
    findings = []
    truth_by_group = {c.group_id: c for c in truth.components}
    case_by_group = {p.group_id: p for p in case.primitives}

    for gid in sorted(truth_by_group.keys() - case_by_group.keys()):
        c = truth_by_group[gid]
        findings.append(Finding(
            "F6", f"{c.kind}[group={gid}]", f"missing component ({c.kind}, {c.role})"))
    for gid in sorted(case_by_group.keys() - truth_by_group.keys()):
        p = case_by_group[gid]
        findings.append(Finding(
            "F6", f"{p.kind}[group={gid}]", f"extra component ({p.kind}, {p.role})"))
    for gid in sorted(truth_by_group.keys() & case_by_group.keys()):
        c, p = truth_by_group[gid], case_by_group[gid]
        if (c.kind, c.role) != (p.kind, p.role):
            findings.append(Finding(
                "F6", f"{p.kind}[group={gid}]",
                f"wrong type: expected ({c.kind}, {c.role}), got ({p.kind}, {p.role})"))
    return findings


def validate_all(case: CaseDefinition | None, frame: ParticleFrame | None,
                 truth: GroundTruthSpec, numerics: NumericalSpec | None = None,
                 parse_error: ParseError | None = None) -> ValidationReport:
    """Union of all checks; a parse failure short-circuits to a single F5 finding."""
    if parse_error is not None:
        return ValidationReport([Finding(
            "F5", "document",
            f"{parse_error.category} at line {parse_error.line}: {parse_error.message}")])
    if case is None:
        raise ValueError("need a case unless a parse error is supplied")
    num = numerics or case.numerics
    findings: list[Finding] = []
    findings += check_dimensions(case, truth)
    if frame is not None:
        findings += check_interface(frame, num, truth)
        findings += check_boundary_thickness(case, frame, num)
    findings += check_frames(case, truth)
    findings += check_structure(case, truth)
    return ValidationReport(findings)
