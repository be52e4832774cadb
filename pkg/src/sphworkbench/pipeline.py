"""Deterministic simulation pipeline: generate, preview, solve, export.

The stage sequence is fixed in code and identical on every run:

    validate -> generate -> preview -> solve -> finalize

No stage consults a planner; the pipeline depends only on the case it is
given.  Frame files are exported as they are produced (CSV always, VTK
optionally), with a manifest mapping frame index to simulated time.
Running the same case twice produces byte-identical outputs.
"""

from __future__ import annotations

import json
import os
import time as _time
from dataclasses import asdict, dataclass

from .casedef import CaseDefinition, validate_semantics
from .casexml import emit_case
from .frameio import frame_name, frame_to_csv, frame_to_vtk, write_manifest
from .particles import generate_particles
from .postproc.render import render_snapshot
from .solver.core import BlowUpError, compute_dt, init_state, step

__all__ = ["RunSummary", "run_pipeline", "STAGES"]

STAGES = ("validate", "generate", "preview", "solve", "finalize")


@dataclass
class RunSummary:
    frames_written: int
    wall_time: float
    final_time: float
    instability_flag: bool
    output_dir: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def run_pipeline(case: CaseDefinition, out_dir: str,
                 formats: tuple[str, ...] = ("csv", "vtk"),
                 on_progress=None, on_stage=None) -> RunSummary:
    """Execute the fixed pipeline for one case into one output directory.

    on_progress(fraction, simulated_time) fires after every written frame;
    on_stage(name) fires as each stage starts.  Instability keeps partial
    outputs and sets the flag instead of discarding the run.
    """
    started = _time.monotonic()
    _stage(on_stage, "validate")
    issues = validate_semantics(case)
    if issues:
        raise ValueError(f"case is semantically invalid: {issues[0]}")
    os.makedirs(out_dir, exist_ok=True)

    _stage(on_stage, "generate")
    frame0 = generate_particles(case)

    _stage(on_stage, "preview")
    with open(os.path.join(out_dir, "preview.svg"), "w", newline="\n") as f:
        f.write(render_snapshot(frame0, color_by="group", plane="xz"))
    with open(os.path.join(out_dir, "case_used.xml"), "w", newline="\n") as f:
        f.write(emit_case(case))

    _stage(on_stage, "solve")
    state = init_state(case, frame0)
    interval = case.controls.output_interval
    t_end = case.controls.t_end
    times: list[float] = []
    instability = False

    def export(frame) -> None:
        idx = len(times)
        if "csv" in formats:
            with open(os.path.join(out_dir, frame_name(idx, "csv")), "w", newline="\n") as f:
                f.write(frame_to_csv(frame))
        if "vtk" in formats:
            with open(os.path.join(out_dir, frame_name(idx, "vtk")), "w", newline="\n") as f:
                f.write(frame_to_vtk(frame))
        times.append(frame.time)
        if on_progress is not None:
            on_progress(min(frame.time / t_end, 1.0), frame.time)

    export(state.frame)
    next_out = interval
    try:
        while state.time < t_end - 1e-12:
            dt = compute_dt(state)
            dt = min(dt, next_out - state.time)
            step(state, dt)
            if state.time >= next_out - 1e-12:
                state.frame.time = next_out  # land exactly on the output grid
                export(state.frame)
                next_out = len(times) * interval
    except BlowUpError:
        instability = True

    _stage(on_stage, "finalize")
    write_manifest(os.path.join(out_dir, "manifest.txt"), times)
    summary = RunSummary(
        frames_written=len(times),
        wall_time=_time.monotonic() - started,
        final_time=times[-1] if times else 0.0,
        instability_flag=instability,
        output_dir=out_dir)
    with open(os.path.join(out_dir, "summary.json"), "w", newline="\n") as f:
        f.write(summary.to_json() + "\n")
    return summary


def _stage(on_stage, name: str) -> None:
    if on_stage is not None:
        on_stage(name)
