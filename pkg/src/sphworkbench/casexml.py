"""Case XML: parse, emit, and structurally diff case documents.

The accepted vocabulary is a strict subset documented in docs/xml_schema.md
(geometry, materials, numerics, run controls; SI units; angles in degrees).
Unknown tags and attributes are parse errors rather than silently ignored:
silent acceptance would mask exactly the syntax-failure class this module
exists to detect.

Floats are serialized with shortest round-trip formatting (repr), so
parse(emit(case)) reproduces every field bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.parsers import expat

from .casedef import (
    AXES,
    CaseDefinition,
    Frame,
    GeometryPrimitive,
    KINDS,
    MaterialSpec,
    NumericalSpec,
    ROLES,
    RunControls,
    validate_semantics,
)

__all__ = ["ParseError", "StructuralDiff", "parse_case", "emit_case", "diff_cases"]


@dataclass
class ParseError(Exception):
    message: str
    line: int = 1
    byte_offset: int = 0
    category: str = "malformed_xml"  # | unknown_tag | bad_attribute | missing_required

    def __str__(self) -> str:
        return f"{self.category} (line {self.line}): {self.message}"


@dataclass
class StructuralDiff:
    missing_components: list = field(default_factory=list)  # (kind, role, group)
    extra_components: list = field(default_factory=list)
    dimension_deltas: list = field(default_factory=list)    # (path, expected, actual)
    frame_deltas: list = field(default_factory=list)        # (path, description)

    @property
    def empty(self) -> bool:
        return not (self.missing_components or self.extra_components
                    or self.dimension_deltas or self.frame_deltas)


# ---------------------------------------------------------------- parsing

class _Node:
    __slots__ = ("tag", "attrib", "children", "line")

    def __init__(self, tag, attrib, line):
        self.tag = tag
        self.attrib = dict(attrib)
        self.children = []
        self.line = line


def _parse_tree(text: str) -> _Node:
    """Minimal expat-driven tree that remembers source line numbers."""
    root: list[_Node] = []
    stack: list[_Node] = []
    parser = expat.ParserCreate()

    def start(tag, attrib):
        node = _Node(tag, attrib, parser.CurrentLineNumber)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(tag):
        stack.pop()

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        raise ParseError(
            message=str(exc),
            line=exc.lineno,
            byte_offset=exc.offset,
            category="malformed_xml",
        ) from exc
    if not root:
        raise ParseError(message="empty document", category="malformed_xml")
    return root[0]


def _bad(node: _Node, message: str, category: str) -> ParseError:
    return ParseError(message=message, line=node.line, category=category)


def _take_float(node: _Node, name: str, required: bool = True, default: float = 0.0) -> float:
    if name not in node.attrib:
        if required:
            raise _bad(node, f"<{node.tag}> missing attribute {name!r}", "missing_required")
        return default
    raw = node.attrib.pop(name)
    try:
        return float(raw)
    except ValueError:
        raise _bad(node, f"attribute {name}={raw!r} is not a number", "bad_attribute") from None


def _take_int(node: _Node, name: str, required: bool = True, default: int | None = None):
    if name not in node.attrib:
        if required:
            raise _bad(node, f"<{node.tag}> missing attribute {name!r}", "missing_required")
        return default
    raw = node.attrib.pop(name)
    try:
        return int(raw)
    except ValueError:
        raise _bad(node, f"attribute {name}={raw!r} is not an integer", "bad_attribute") from None


def _take_str(node: _Node, name: str) -> str:
    if name not in node.attrib:
        raise _bad(node, f"<{node.tag}> missing attribute {name!r}", "missing_required")
    return node.attrib.pop(name)


def _no_leftovers(node: _Node) -> None:
    if node.attrib:
        name = sorted(node.attrib)[0]
        raise _bad(node, f"unknown attribute {name!r} on <{node.tag}>", "bad_attribute")


def _vector(node: _Node) -> tuple[float, float, float]:
    v = (_take_float(node, "x"), _take_float(node, "y"), _take_float(node, "z"))
    _no_leftovers(node)
    return v


def _parse_primitive(node: _Node) -> GeometryPrimitive:
    if node.tag not in KINDS:
        raise _bad(node, f"unknown geometry tag <{node.tag}>", "unknown_tag")
    role = _take_str(node, "role")
    if role not in ROLES:
        raise _bad(node, f"unknown role {role!r}", "bad_attribute")
    group = _take_int(node, "group")
    layers = _take_int(node, "layers", required=False)
    mass_density = None
    if "mass_density" in node.attrib:
        mass_density = _take_float(node, "mass_density")
    wetted = node.attrib.pop("wetted", "+")
    if wetted not in ("+", "-"):
        raise _bad(node, f"wetted must be '+' or '-', got {wetted!r}", "bad_attribute")
    _no_leftovers(node)

    origin = (0.0, 0.0, 0.0)
    rotations: list[tuple[str, float]] = []
    extents = None
    for child in node.children:
        if child.tag == "origin":
            origin = _vector(child)
        elif child.tag == "rotate":
            axis = _take_str(child, "axis")
            if axis not in AXES:
                raise _bad(child, f"unknown rotation axis {axis!r}", "bad_attribute")
            angle = _take_float(child, "angle")
            _no_leftovers(child)
            rotations.append((axis, angle))
        elif child.tag == "extents":
            extents = _vector(child)
        else:
            raise _bad(child, f"unknown tag <{child.tag}> in <{node.tag}>", "unknown_tag")
    if extents is None:
        raise _bad(node, f"<{node.tag}> missing <extents>", "missing_required")

    return GeometryPrimitive(
        kind=node.tag, role=role, group_id=group,
        local_frame=Frame(origin=origin, rotations=tuple(rotations)),
        extents=extents, layers=layers, mass_density=mass_density,
        wetted_sign=1 if wetted == "+" else -1)


def parse_case(text: str) -> CaseDefinition:
    """Parse a case document; raises ParseError (never returns a partial case)."""
    root = _parse_tree(text)
    if root.tag != "case":
        raise _bad(root, f"root element must be <case>, got <{root.tag}>", "unknown_tag")
    dim = _take_int(root, "dimensionality")
    _no_leftovers(root)

    gravity = None
    primitives: list[GeometryPrimitive] = []
    materials: list[MaterialSpec] = []
    numerics = None
    controls = None

    for section in root.children:
        if section.tag == "gravity":
            gravity = _vector(section)
        elif section.tag == "geometry":
            _no_leftovers(section)
            for child in section.children:
                primitives.append(_parse_primitive(child))
        elif section.tag == "materials":
            _no_leftovers(section)
            for child in section.children:
                if child.tag != "material":
                    raise _bad(child, f"unknown tag <{child.tag}> in <materials>", "unknown_tag")
                materials.append(MaterialSpec(
                    group_id=_take_int(child, "group"),
                    rho0=_take_float(child, "rho0"),
                    mu=_take_float(child, "mu"),
                    n=_take_float(child, "n", required=False, default=1.0),
                    tau_y=_take_float(child, "tau_y", required=False, default=0.0),
                    m_papanastasiou=_take_float(child, "m", required=False, default=0.0),
                ))
                _no_leftovers(child)
        elif section.tag == "numerics":
            numerics = NumericalSpec(
                dp=_take_float(section, "dp"),
                cs=_take_float(section, "cs"),
                alpha=_take_float(section, "alpha", required=False, default=0.0),
                cfl=_take_float(section, "cfl", required=False, default=0.3),
                h_coef=_take_float(section, "h_coef", required=False, default=1.2),
            )
            _no_leftovers(section)
        elif section.tag == "controls":
            controls = RunControls(
                t_end=_take_float(section, "t_end"),
                output_interval=_take_float(section, "output_interval"),
                seed=_take_int(section, "seed", required=False, default=0),
            )
            _no_leftovers(section)
        else:
            raise _bad(section, f"unknown tag <{section.tag}> in <case>", "unknown_tag")

    if gravity is None:
        raise ParseError(message="missing <gravity>", category="missing_required")
    if numerics is None:
        raise ParseError(message="missing <numerics>", category="missing_required")
    if controls is None:
        raise ParseError(message="missing <controls>", category="missing_required")

    return CaseDefinition(
        dimensionality=dim, gravity=gravity, primitives=tuple(primitives),
        materials=tuple(materials), numerics=numerics, controls=controls)


# ---------------------------------------------------------------- emitting

def _fmt(x: float) -> str:
    return repr(float(x))


def _vec_attrs(v) -> str:
    return f'x="{_fmt(v[0])}" y="{_fmt(v[1])}" z="{_fmt(v[2])}"'


def emit_case(case: CaseDefinition) -> str:
    """Serialize a semantically valid case to its canonical byte-stable form."""
    issues = validate_semantics(case)
    if issues:
        raise ValueError(f"refusing to emit semantically invalid case: {issues[0]}")

    out: list[str] = []
    out.append(f'<case dimensionality="{case.dimensionality}">')
    out.append(f"  <gravity {_vec_attrs(case.gravity)}/>")
    out.append("  <geometry>")
    for prim in case.primitives:
        attrs = [f'role="{prim.role}"', f'group="{prim.group_id}"']
        if prim.layers is not None:
            attrs.append(f'layers="{prim.layers}"')
        if prim.mass_density is not None:
            attrs.append(f'mass_density="{_fmt(prim.mass_density)}"')
        if prim.kind == "plane_wall" and prim.wetted_sign < 0:
            attrs.append('wetted="-"')
        out.append(f"    <{prim.kind} {' '.join(attrs)}>")
        out.append(f"      <origin {_vec_attrs(prim.local_frame.origin)}/>")
        for axis, angle in prim.local_frame.rotations:
            out.append(f'      <rotate axis="{axis}" angle="{_fmt(angle)}"/>')
        out.append(f"      <extents {_vec_attrs(prim.extents)}/>")
        out.append(f"    </{prim.kind}>")
    out.append("  </geometry>")
    out.append("  <materials>")
    for mat in case.materials:
        out.append(
            f'    <material group="{mat.group_id}" rho0="{_fmt(mat.rho0)}" '
            f'mu="{_fmt(mat.mu)}" n="{_fmt(mat.n)}" tau_y="{_fmt(mat.tau_y)}" '
            f'm="{_fmt(mat.m_papanastasiou)}"/>')
    out.append("  </materials>")
    num = case.numerics
    out.append(
        f'  <numerics dp="{_fmt(num.dp)}" cs="{_fmt(num.cs)}" alpha="{_fmt(num.alpha)}" '
        f'cfl="{_fmt(num.cfl)}" h_coef="{_fmt(num.h_coef)}"/>')
    ctl = case.controls
    out.append(
        f'  <controls t_end="{_fmt(ctl.t_end)}" output_interval="{_fmt(ctl.output_interval)}" '
        f'seed="{ctl.seed}"/>')
    out.append("</case>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- diffing

def _component_key(prim: GeometryPrimitive) -> tuple:
    return (prim.kind, prim.role, prim.group_id)


def diff_cases(reference: CaseDefinition, candidate: CaseDefinition,
               tol_m: float = 0.01) -> StructuralDiff:
    """Structural comparison; components matched by (kind, role, group_id).

    Dimension deltas are reported only when |expected - actual| > tol_m;
    frame deltas when origins differ by more than tol_m or composed rotations
    by more than one degree.
    """
    from .particles import rotation_matrix  # local import avoids a cycle at import time
    import numpy as np

    diff = StructuralDiff()
    ref_map = {_component_key(p): p for p in reference.primitives}
    cand_map = {_component_key(p): p for p in candidate.primitives}

    for key in sorted(ref_map.keys() - cand_map.keys()):
        diff.missing_components.append(key)
    for key in sorted(cand_map.keys() - ref_map.keys()):
        diff.extra_components.append(key)

    for key in sorted(ref_map.keys() & cand_map.keys()):
        ref_p, cand_p = ref_map[key], cand_map[key]
        path = f"{key[0]}[group={key[2]}]"
        for ax, name in enumerate(("x", "y", "z")):
            exp, act = ref_p.extents[ax], cand_p.extents[ax]
            if abs(exp - act) > tol_m:
                diff.dimension_deltas.append((f"{path}.extents.{name}", exp, act))
        d_origin = np.linalg.norm(
            np.asarray(ref_p.local_frame.origin) - np.asarray(cand_p.local_frame.origin))
        if d_origin > tol_m:
            diff.frame_deltas.append((path, f"origin offset {d_origin:.6g} m"))
        r_rel = rotation_matrix(ref_p.local_frame).T @ rotation_matrix(cand_p.local_frame)
        angle = float(np.degrees(np.arccos(np.clip((np.trace(r_rel) - 1.0) / 2.0, -1.0, 1.0))))
        if angle > 1.0:
            diff.frame_deltas.append((path, f"rotation differs by {angle:.3g} deg"))

    return diff
