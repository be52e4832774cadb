"""Typed registry of analysis tools.

Descriptors (name, parameter schema, units, one-line doc) are plain data:
a planner chooses tools by matching structured descriptors, and the
orchestrator validates arguments against the schema before anything runs.
Every tool is callable from the command line through the same entry point.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import jsonschema

from ..casedef import CaseDefinition, smoothing_length
from ..frameio import LoadedRun
from .errors import EmptySelection
from .events import hit_time
from .flux import mass_flux
from .forces import bending_moment, body_com_series, reaction_force
from .partition import partition_flow
from .profile import surface_profile
from .render import FIELDS, PLANES, render_snapshot
from .series import PRESETS, Selector, preset_series
from .walls import PlaneSpec, infer_wall_face

__all__ = ["ToolError", "ToolResult", "ToolDescriptor", "TOOLS",
           "tool_descriptors", "get_tool", "run_tool"]


class ToolError(Exception):
    """Unknown tool or schema-invalid arguments."""


@dataclass
class ToolResult:
    tool: str
    artifacts: list[str]          # file names inside the output directory
    summary: str


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    doc: str
    units: str
    schema: dict
    output: str                   # csv | svg | json

    def describe(self) -> dict:
        return {"name": self.name, "doc": self.doc, "units": self.units,
                "output": self.output, "parameters": self.schema}


def _vec3(description: str) -> dict:
    return {"type": "array", "items": {"type": "number"},
            "minItems": 3, "maxItems": 3, "description": description}


def _write(out_dir: str, name: str, text: str) -> str:
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="\n") as f:
        f.write(text)
    return name


def _plane(args) -> PlaneSpec:
    return PlaneSpec.normalized(args["plane_point"], args["plane_normal"])


def _selector(args) -> Selector:
    return Selector(kind=args.get("kind", "fluid"), group=args.get("group"))


def _run_scalar_series(run: LoadedRun, case: CaseDefinition, args: dict, out_dir: str) -> ToolResult:
    series = preset_series(args["preset"], run.frames, _selector(args))
    name = _write(out_dir, f"scalar_{args['preset']}.csv", series.to_csv())
    return ToolResult("scalar_series", [name],
                      f"{series.label}: {len(series.times)} samples")


def _run_surface_profile(run, case, args, out_dir):
    frame = run.frames[args.get("frame_index", len(run.frames) - 1)]
    dp = case.numerics.dp
    prof = surface_profile(frame, _plane(args), args.get("band", 2 * dp), dp,
                           group=args.get("group"))
    rows = ["s,height"] + [f"{repr(float(u))},{repr(float(z))}" for u, z in prof]
    name = _write(out_dir, "surface_profile.csv", "\n".join(rows) + "\n")
    return ToolResult("surface_profile", [name],
                      f"profile with {prof.shape[0]} bins at t={frame.time:g} s")


def _run_partition_flow(run, case, args, out_dir):
    face = infer_wall_face(run.frames[0], args["barrier_group"], case.numerics.dp)
    result = partition_flow(run.frames, face, mode=args.get("mode", "trajectory"))
    name = _write(out_dir, "partition.csv", result.to_csv())
    frac = ", ".join(f"{k}={v:.3f}" for k, v in result.fractions.items() if v > 0)
    return ToolResult("partition_flow", [name], f"fractions: {frac}")


def _run_mass_flux(run, case, args, out_dir):
    series, cumulative = mass_flux(run.frames, _plane(args))
    name = _write(out_dir, "mass_flux.csv", series.to_csv())
    return ToolResult("mass_flux", [name],
                      f"cumulative mass through plane: {cumulative:.6g} kg")


def _run_reaction_force(run, case, args, out_dir):
    result = reaction_force(run.frames, args["group"], case)
    name = _write(out_dir, f"reaction_force_g{args['group']}.csv", result.series.to_csv())
    return ToolResult("reaction_force", [name],
                      f"group {result.group} has {result.group_size} particles; "
                      f"|F| at end = {abs(result.series.values[-1]).max():.6g} N")


def _run_bending_moment(run, case, args, out_dir):
    result = reaction_force(run.frames, args["group"], case, retain_pointwise=True)
    series = bending_moment(result, tuple(args["base_point"]))
    name = _write(out_dir, f"bending_moment_g{args['group']}.csv", series.to_csv())
    return ToolResult("bending_moment", [name],
                      f"moment about {tuple(args['base_point'])}, group size "
                      f"{result.group_size}")


def _run_hit_time(run, case, args, out_dir):
    dim = case.dimensionality
    face = infer_wall_face(run.frames[0], args["wall_group"], case.numerics.dp)
    t = hit_time(run.frames, face, args["criterion"],
                 h=smoothing_length(case.numerics, dim),
                 threshold=args.get("threshold"))
    payload = json.dumps({"wall_group": args["wall_group"],
                          "criterion": args["criterion"], "hit_time_s": t}, indent=2)
    name = _write(out_dir, f"hit_time_g{args['wall_group']}.json", payload + "\n")
    return ToolResult("hit_time", [name], f"hit at t = {t:g} s ({args['criterion']})")


def _run_infer_wall_face(run, case, args, out_dir):
    face = infer_wall_face(run.frames[0], args["group"], case.numerics.dp)
    payload = json.dumps({
        "group": face.group,
        "face_point": list(face.face.point),
        "face_normal": list(face.face.normal),
        "thickness_m": face.thickness}, indent=2)
    name = _write(out_dir, f"wall_face_g{args['group']}.json", payload + "\n")
    return ToolResult("infer_wall_face", [name],
                      f"wetted face normal {tuple(round(float(x), 6) for x in face.face.normal)}, "
                      f"thickness {face.thickness:.6g} m")


def _run_body_com_series(run, case, args, out_dir):
    series = body_com_series(run.frames, args["group"])
    name = _write(out_dir, f"body_com_g{args['group']}.csv", series.to_csv())
    return ToolResult("body_com_series", [name], series.label)


def _run_render_snapshot(run, case, args, out_dir):
    idx = args.get("frame_index", len(run.frames) - 1)
    svg = render_snapshot(run.frames[idx], color_by=args.get("color_by", "speed"),
                          plane=args.get("plane", "xz"))
    name = _write(out_dir, f"snapshot_{idx:04d}.svg", svg)
    return ToolResult("render_snapshot", [name],
                      f"frame {idx} at t={run.frames[idx].time:g} s")


_GROUP = {"type": "integer", "description": "particle group id"}

TOOLS: dict[str, tuple[ToolDescriptor, callable]] = {}


def _register(descriptor: ToolDescriptor, runner) -> None:
    TOOLS[descriptor.name] = (descriptor, runner)


_register(ToolDescriptor(
    name="scalar_series",
    doc="Reduce a particle quantity to one value per frame (run-out, front, surge, sinking)",
    units="m vs s",
    schema={"type": "object",
            "properties": {
                "preset": {"type": "string", "enum": sorted(PRESETS)},
                "group": _GROUP,
                "kind": {"type": "string", "enum": ["fluid", "boundary", "floating"]}},
            "required": ["preset"], "additionalProperties": False},
    output="csv"), _run_scalar_series)

_register(ToolDescriptor(
    name="surface_profile",
    doc="Upper-envelope fluid profile at a vertical cutting plane",
    units="m vs m",
    schema={"type": "object",
            "properties": {
                "plane_point": _vec3("a point on the cutting plane"),
                "plane_normal": _vec3("plane normal (horizontal)"),
                "band": {"type": "number", "description": "slab half-width, m"},
                "frame_index": {"type": "integer"},
                "group": _GROUP},
            "required": ["plane_point", "plane_normal"], "additionalProperties": False},
    output="csv"), _run_surface_profile)

_register(ToolDescriptor(
    name="partition_flow",
    doc="Label fluid as upstream / overtopped / leaked relative to a barrier",
    units="fractions",
    schema={"type": "object",
            "properties": {
                "barrier_group": _GROUP,
                "mode": {"type": "string", "enum": ["static", "trajectory"]}},
            "required": ["barrier_group"], "additionalProperties": False},
    output="csv"), _run_partition_flow)

_register(ToolDescriptor(
    name="mass_flux",
    doc="Mass flux and cumulative mass through a plane from particle crossings",
    units="kg/s vs s",
    schema={"type": "object",
            "properties": {
                "plane_point": _vec3("a point on the flux plane"),
                "plane_normal": _vec3("flux plane normal")},
            "required": ["plane_point", "plane_normal"], "additionalProperties": False},
    output="csv"), _run_mass_flux)

_register(ToolDescriptor(
    name="reaction_force",
    doc="Net fluid force on a boundary or floating group vs time",
    units="N vs s",
    schema={"type": "object", "properties": {"group": _GROUP},
            "required": ["group"], "additionalProperties": False},
    output="csv"), _run_reaction_force)

_register(ToolDescriptor(
    name="bending_moment",
    doc="Bending moment of fluid forces on a group about a base point vs time",
    units="N*m vs s",
    schema={"type": "object",
            "properties": {"group": _GROUP, "base_point": _vec3("moment reference point")},
            "required": ["group", "base_point"], "additionalProperties": False},
    output="csv"), _run_bending_moment)

_register(ToolDescriptor(
    name="hit_time",
    doc="First time the fluid mechanically reaches a wall (kernel range or pressure rise)",
    units="s",
    schema={"type": "object",
            "properties": {
                "wall_group": _GROUP,
                "criterion": {"type": "string", "enum": ["kernel_range", "pressure_rise"]},
                "threshold": {"type": "number", "description": "pressure rise, Pa"}},
            "required": ["wall_group", "criterion"], "additionalProperties": False},
    output="json"), _run_hit_time)

_register(ToolDescriptor(
    name="infer_wall_face",
    doc="Locate the wetted face plane and thickness of a finite-thickness wall",
    units="m",
    schema={"type": "object", "properties": {"group": _GROUP},
            "required": ["group"], "additionalProperties": False},
    output="json"), _run_infer_wall_face)

_register(ToolDescriptor(
    name="body_com_series",
    doc="Center of mass of a floating block vs time",
    units="m vs s",
    schema={"type": "object", "properties": {"group": _GROUP},
            "required": ["group"], "additionalProperties": False},
    output="csv"), _run_body_com_series)

_register(ToolDescriptor(
    name="render_snapshot",
    doc="Deterministic SVG scatter of one frame, colored by a field",
    units="image",
    schema={"type": "object",
            "properties": {
                "frame_index": {"type": "integer"},
                "color_by": {"type": "string", "enum": sorted(FIELDS)},
                "plane": {"type": "string", "enum": sorted(PLANES)}},
            "additionalProperties": False},
    output="svg"), _run_render_snapshot)


def tool_descriptors() -> list[dict]:
    return [desc.describe() for desc, _ in TOOLS.values()]


def get_tool(name: str) -> ToolDescriptor:
    try:
        return TOOLS[name][0]
    except KeyError:
        raise ToolError(f"unknown tool {name!r}; have {sorted(TOOLS)}") from None


def run_tool(name: str, args: dict, run: LoadedRun, case: CaseDefinition,
             out_dir: str) -> ToolResult:
    """Validate args against the tool schema and execute."""
    if name not in TOOLS:
        raise ToolError(f"unknown tool {name!r}; have {sorted(TOOLS)}")
    descriptor, runner = TOOLS[name]
    try:
        jsonschema.validate(args, descriptor.schema)
    except jsonschema.ValidationError as exc:
        raise ToolError(f"invalid arguments for {name}: {exc.message}") from exc
    os.makedirs(out_dir, exist_ok=True)
    return runner(run, case, args, out_dir)
