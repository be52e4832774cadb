"""Typed simulation-case model and semantic validation.

Unit conventions (SI throughout):
  lengths m, densities kg/m^3, stresses Pa, times s, angles degrees.

2D cases live in the x-z plane; the y axis is suppressed (zero extents,
zero offsets, rotations about y only).  Vectors are always stored with
three components so 2D and 3D share one code path downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

__all__ = [
    "Frame",
    "GeometryPrimitive",
    "MaterialSpec",
    "NumericalSpec",
    "RunControls",
    "CaseDefinition",
    "SemanticIssue",
    "validate_semantics",
    "required_boundary_layers",
    "smoothing_length",
    "KINDS",
    "ROLES",
]

KINDS = ("box", "fill_region", "plane_wall")
ROLES = ("fluid", "fixed_boundary", "floating_body")
AXES = ("x", "y", "z")


@dataclass(frozen=True)
class Frame:
    """Rigid placement: rotations about named axes (applied in order), then translation."""

    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rotations: tuple[tuple[str, float], ...] = ()  # (axis, angle_deg)


@dataclass(frozen=True)
class GeometryPrimitive:
    kind: str                      # box | fill_region | plane_wall
    role: str                      # fluid | fixed_boundary | floating_body
    group_id: int
    local_frame: Frame = field(default_factory=Frame)
    extents: tuple[float, float, float] = (0.0, 0.0, 0.0)
    layers: int | None = None      # boundary layer count, fixed_boundary only
    mass_density: float | None = None  # floating_body only, kg/m^3
    wetted_sign: int = 1           # plane_wall only: fluid side along +/- local normal


@dataclass(frozen=True)
class MaterialSpec:
    """Herschel-Bulkley rheology with exponential regularization.

    mu is the consistency index (Pa*s^n), n the power-law index, tau_y the
    yield stress (Pa) and m_papanastasiou the regularization exponent (s).
    """

    group_id: int
    rho0: float
    mu: float
    n: float = 1.0
    tau_y: float = 0.0
    m_papanastasiou: float = 0.0


@dataclass(frozen=True)
class NumericalSpec:
    dp: float                      # initial particle spacing, m
    cs: float                      # numerical speed of sound, m/s
    alpha: float = 0.0             # artificial viscosity coefficient
    cfl: float = 0.3
    h_coef: float = 1.2            # smoothing length = h_coef * dp * sqrt(dim)


@dataclass(frozen=True)
class RunControls:
    t_end: float
    output_interval: float
    seed: int = 0


@dataclass(frozen=True)
class CaseDefinition:
    dimensionality: int
    gravity: tuple[float, float, float]
    primitives: tuple[GeometryPrimitive, ...]
    materials: tuple[MaterialSpec, ...]
    numerics: NumericalSpec
    controls: RunControls

    def material_for(self, group_id: int) -> MaterialSpec | None:
        for mat in self.materials:
            if mat.group_id == group_id:
                return mat
        return None

    def primitive_for(self, group_id: int) -> GeometryPrimitive | None:
        for prim in self.primitives:
            if prim.group_id == group_id:
                return prim
        return None

    def with_primitive(self, group_id: int, **changes) -> "CaseDefinition":
        """Copy with one primitive's fields replaced (test/fixture helper)."""
        prims = tuple(
            replace(p, **changes) if p.group_id == group_id else p
            for p in self.primitives
        )
        return replace(self, primitives=prims)


@dataclass(frozen=True)
class SemanticIssue:
    code: str
    path: str
    message: str

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"{self.code} at {self.path}: {self.message}"


def smoothing_length(numerics: NumericalSpec, dimensionality: int) -> float:
    """h = h_coef * dp * sqrt(d); kernel support radius is 2h."""
    return numerics.h_coef * numerics.dp * math.sqrt(dimensionality)


def required_boundary_layers(numerics: NumericalSpec, dimensionality: int) -> int:
    """Minimum boundary layer count preventing kernel-support truncation.

    A fluid particle touching a wall sees kernel support out to 2h into the
    wall, so the wall must be at least ceil(2h/dp) particle rows thick.
    """
    h = smoothing_length(numerics, dimensionality)
    return math.ceil(2.0 * h / numerics.dp - 1e-12)


def _finite(*values: float) -> bool:
    return all(isinstance(v, (int, float)) and math.isfinite(v) for v in values)


def _check_frame(frame: Frame, dim: int, path: str, issues: list[SemanticIssue]) -> None:
    if not _finite(*frame.origin):
        issues.append(SemanticIssue("bad_frame", path, "origin has non-finite component"))
    for axis, angle in frame.rotations:
        if axis not in AXES:
            issues.append(SemanticIssue("bad_frame", path, f"unknown rotation axis {axis!r}"))
        elif not _finite(angle):
            issues.append(SemanticIssue("bad_frame", path, "rotation angle not finite"))
        elif dim == 2 and axis != "y" and angle % 360.0 != 0.0:
            issues.append(SemanticIssue(
                "bad_dimensionality", path,
                f"2D case allows rotations about y only, found axis {axis!r}"))
    if dim == 2 and frame.origin[1] != 0.0:
        issues.append(SemanticIssue(
            "bad_dimensionality", path, "2D case requires origin y = 0"))


def _check_primitive(prim: GeometryPrimitive, dim: int, issues: list[SemanticIssue]) -> None:
    path = f"primitive[group={prim.group_id}]"
    if prim.kind not in KINDS:
        issues.append(SemanticIssue("unknown_kind", path, f"kind {prim.kind!r}"))
        return
    if prim.role not in ROLES:
        issues.append(SemanticIssue("unknown_role", path, f"role {prim.role!r}"))
        return
    if prim.kind == "fill_region" and prim.role != "fluid":
        issues.append(SemanticIssue("bad_role", path, "fill_region must be fluid"))
    if prim.kind == "plane_wall" and prim.role != "fixed_boundary":
        issues.append(SemanticIssue("bad_role", path, "plane_wall must be fixed_boundary"))

    _check_frame(prim.local_frame, dim, path, issues)

    ex = prim.extents
    if not _finite(*ex):
        issues.append(SemanticIssue("bad_extent", path, "non-finite extent"))
        return
    active = (0, 2) if dim == 2 else (0, 1, 2)
    if dim == 2 and ex[1] != 0.0:
        issues.append(SemanticIssue(
            "bad_dimensionality", path, "2D primitive must have zero y extent"))
    zero_active = [i for i in active if ex[i] == 0.0]
    negative = [i for i in active if ex[i] < 0.0]
    if negative:
        issues.append(SemanticIssue("bad_extent", path, "negative extent"))
    if prim.kind == "plane_wall":
        if len(zero_active) != 1:
            issues.append(SemanticIssue(
                "bad_extent", path,
                "plane_wall needs exactly one zero extent (its normal axis)"))
        if prim.wetted_sign not in (1, -1):
            issues.append(SemanticIssue("bad_extent", path, "wetted_sign must be +1 or -1"))
    else:
        if zero_active:
            issues.append(SemanticIssue("bad_extent", path, "extent must be > 0"))

    if prim.role == "fixed_boundary":
        if prim.layers is None or prim.layers < 1:
            issues.append(SemanticIssue("bad_layers", path, "boundary needs layers >= 1"))
    elif prim.layers is not None:
        issues.append(SemanticIssue("bad_layers", path, "layers only valid on boundaries"))

    if prim.role == "floating_body":
        if prim.mass_density is None or not _finite(prim.mass_density) or prim.mass_density <= 0:
            issues.append(SemanticIssue(
                "bad_density", path, "floating body needs mass_density > 0"))
    elif prim.mass_density is not None:
        issues.append(SemanticIssue(
            "bad_density", path, "mass_density only valid on floating bodies"))


def _check_material(mat: MaterialSpec, issues: list[SemanticIssue]) -> None:
    path = f"material[group={mat.group_id}]"
    if not _finite(mat.rho0, mat.mu, mat.n, mat.tau_y, mat.m_papanastasiou):
        issues.append(SemanticIssue("bad_material", path, "non-finite parameter"))
        return
    if mat.rho0 <= 0:
        issues.append(SemanticIssue("bad_density", path, "rho0 must be > 0"))
    if mat.mu < 0:
        issues.append(SemanticIssue("negative_consistency", path, "mu must be >= 0"))
    if mat.n <= 0:
        issues.append(SemanticIssue("bad_power_index", path, "n must be > 0"))
    if mat.tau_y < 0:
        issues.append(SemanticIssue("negative_yield_stress", path, "tau_y must be >= 0"))
    if mat.m_papanastasiou < 0:
        issues.append(SemanticIssue("bad_regularization", path, "m must be >= 0"))


def validate_semantics(case: CaseDefinition) -> list[SemanticIssue]:
    """Check every model invariant; returns an empty list iff the case is sound.

    Pure: identical input yields an identical issue list.
    """
    issues: list[SemanticIssue] = []

    if case.dimensionality not in (2, 3):
        issues.append(SemanticIssue("bad_dimensionality", "case", "dimensionality must be 2 or 3"))
        return issues

    if not _finite(*case.gravity):
        issues.append(SemanticIssue("bad_gravity", "case", "non-finite gravity"))
    elif case.dimensionality == 2 and case.gravity[1] != 0.0:
        issues.append(SemanticIssue("bad_dimensionality", "case", "2D gravity must have zero y component"))

    if not case.primitives:
        issues.append(SemanticIssue("empty_case", "case", "no geometry primitives"))

    seen: set[int] = set()
    for prim in case.primitives:
        if prim.group_id in seen:
            issues.append(SemanticIssue(
                "duplicate_group", f"primitive[group={prim.group_id}]", "group id reused"))
        seen.add(prim.group_id)
        _check_primitive(prim, case.dimensionality, issues)

    mat_groups: set[int] = set()
    for mat in case.materials:
        if mat.group_id in mat_groups:
            issues.append(SemanticIssue(
                "duplicate_material", f"material[group={mat.group_id}]", "material group reused"))
        mat_groups.add(mat.group_id)
        _check_material(mat, issues)

    # materials not bound to any fluid group are allowed: the first material
    # doubles as the reference density for walls and floating bodies
    fluid_groups = {p.group_id for p in case.primitives if p.role == "fluid"}
    for gid in sorted(fluid_groups - mat_groups):
        issues.append(SemanticIssue(
            "unbound_material", f"primitive[group={gid}]", "fluid group has no material"))

    num = case.numerics
    if not _finite(num.dp, num.cs, num.alpha, num.cfl, num.h_coef):
        issues.append(SemanticIssue("bad_numerics", "numerics", "non-finite parameter"))
    else:
        if num.dp <= 0:
            issues.append(SemanticIssue("bad_numerics", "numerics", "dp must be > 0"))
        if num.cs <= 0:
            issues.append(SemanticIssue("bad_numerics", "numerics", "cs must be > 0"))
        if not (0 < num.cfl <= 1):
            issues.append(SemanticIssue("bad_numerics", "numerics", "cfl must be in (0, 1]"))
        if num.h_coef < 1:
            issues.append(SemanticIssue("bad_numerics", "numerics", "h_coef must be >= 1"))
        if num.alpha < 0:
            issues.append(SemanticIssue("bad_numerics", "numerics", "alpha must be >= 0"))

    ctl = case.controls
    if not _finite(ctl.t_end, ctl.output_interval):
        issues.append(SemanticIssue("bad_controls", "controls", "non-finite parameter"))
    elif not (0 < ctl.output_interval <= ctl.t_end):
        issues.append(SemanticIssue(
            "bad_controls", "controls", "require 0 < output_interval <= t_end"))

    return issues
