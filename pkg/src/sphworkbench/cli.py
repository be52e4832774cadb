"""Command-line front door.

Batch commands (case, gen, check, run, analyze, eval) are thin adapters
over the module operations; `session serve` hosts the HTTP service and
`session repl` drives a session interactively in the terminal.

Exit codes: 0 success, 1 validation findings, 2 usage error.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .casedef import validate_semantics
from .casexml import ParseError, diff_cases, emit_case, parse_case
from .cases import BUILTIN_CASES, builtin_case, builtin_truth
from .frameio import frame_name, frame_to_csv, frame_to_vtk, load_run
from .orchestrator.planner import HttpPlanner, InputEnvelope, ScriptedPlanner
from .orchestrator.session import Action, Phase, Session, SessionConfig
from .particles import OverlapError, generate_particles
from .pipeline import run_pipeline
from .postproc.registry import ToolError, run_tool, tool_descriptors
from .postproc.render import render_snapshot
from .validation import GroundTruthSpec, validate_all
from . import evalkit

PLANNER_TOKEN_ENV = "SPHWB_PLANNER_TOKEN"


def _load_case(path: str):
    """Read a case file or a builtin name (builtin:c1)."""
    if path.startswith("builtin:"):
        return builtin_case(path.split(":", 1)[1])
    with open(path) as f:
        text = f.read()
    return parse_case(text)


def _load_truth(spec: str) -> GroundTruthSpec:
    if spec.startswith("builtin:"):
        return builtin_truth(spec.split(":", 1)[1])
    with open(spec) as f:
        return GroundTruthSpec.from_json(f.read())


def _planner_factory(backend: str):
    if backend.startswith("mock:"):
        path = backend.split(":", 1)[1]
        return lambda: ScriptedPlanner.from_file(path)
    if backend.startswith("http:") or backend.startswith("https:"):
        token = os.environ.get(PLANNER_TOKEN_ENV)
        headers = {"Authorization": f"Bearer {token}"} if token else None

        def make():
            import httpx
            client = httpx.Client(timeout=60.0, headers=headers)
            return HttpPlanner(backend, client=client)
        return make
    if backend == "mock":
        return ScriptedPlanner
    raise click.UsageError(f"planner backend must be mock, mock:<script> or http(s)://..., got {backend!r}")


@click.group()
def main():
    """SPH debris-flow workbench."""


# ----------------------------------------------------------------- case

@main.group()
def case():
    """Validate, normalize, and diff case documents."""


@case.command("validate")
@click.argument("path")
def case_validate(path):
    try:
        c = _load_case(path)
    except ParseError as exc:
        click.echo(f"parse error: {exc}")
        sys.exit(1)
    issues = validate_semantics(c)
    if issues:
        for issue in issues:
            click.echo(str(issue))
        sys.exit(1)
    click.echo("ok")


@case.command("emit")
@click.argument("path")
@click.option("-o", "--out", type=click.Path(), default=None,
              help="write canonical form here (default: stdout)")
def case_emit(path, out):
    c = _load_case(path)
    text = emit_case(c)
    if out:
        with open(out, "w", newline="\n") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


@case.command("diff")
@click.argument("reference")
@click.argument("candidate")
@click.option("--tol", type=float, default=0.01, show_default=True,
              help="dimension tolerance, m")
def case_diff(reference, candidate, tol):
    ref, cand = _load_case(reference), _load_case(candidate)
    diff = diff_cases(ref, cand, tol_m=tol)
    if diff.empty:
        click.echo("identical (within tolerance)")
        return
    for key in diff.missing_components:
        click.echo(f"missing: {key}")
    for key in diff.extra_components:
        click.echo(f"extra: {key}")
    for path, exp, act in diff.dimension_deltas:
        click.echo(f"dimension: {path} expected {exp:g} actual {act:g}")
    for path, desc in diff.frame_deltas:
        click.echo(f"frame: {path} {desc}")
    sys.exit(1)


# ------------------------------------------------------------------ gen

@main.command()
@click.argument("path")
@click.option("-o", "--out", type=click.Path(), required=True)
@click.option("--formats", default="csv,vtk", show_default=True)
def gen(path, out, formats):
    """Generate the initial particle configuration and a preview."""
    c = _load_case(path)
    try:
        frame = generate_particles(c)
    except OverlapError as exc:
        click.echo(f"generation failed: {exc}")
        sys.exit(1)
    os.makedirs(out, exist_ok=True)
    fmts = formats.split(",")
    if "csv" in fmts:
        with open(os.path.join(out, frame_name(0, "csv")), "w", newline="\n") as f:
            f.write(frame_to_csv(frame))
    if "vtk" in fmts:
        with open(os.path.join(out, frame_name(0, "vtk")), "w", newline="\n") as f:
            f.write(frame_to_vtk(frame))
    with open(os.path.join(out, "preview.svg"), "w", newline="\n") as f:
        f.write(render_snapshot(frame, color_by="group"))
    click.echo(f"{frame.n} particles written to {out}")


# ---------------------------------------------------------------- check

@main.command()
@click.argument("path")
@click.option("--truth", required=True,
              help="ground truth: builtin:cN or a truth JSON file")
def check(path, truth):
    """Run the failure-mode validator against a ground truth."""
    truth_spec = _load_truth(truth)
    try:
        c = _load_case(path)
    except ParseError as exc:
        report = validate_all(None, None, truth_spec, parse_error=exc)
        click.echo(report.to_text(), nl=False)
        sys.exit(1)
    try:
        frame = generate_particles(c)
    except OverlapError as exc:
        click.echo(f"generation failed: {exc}")
        sys.exit(1)
    report = validate_all(c, frame, truth_spec)
    click.echo(report.to_text(), nl=False)
    sys.exit(0 if report.passed else 1)


# ------------------------------------------------------------------ run

@main.command()
@click.argument("path")
@click.option("-o", "--out", type=click.Path(), required=True)
@click.option("--formats", default="csv,vtk", show_default=True)
@click.option("--quiet", is_flag=True)
def run(path, out, formats, quiet):
    """Execute the deterministic pipeline."""
    c = _load_case(path)

    def progress(frac, sim_t):
        if not quiet:
            click.echo(f"  t = {sim_t:.3f} s ({frac * 100:.0f}%)")

    summary = run_pipeline(c, out, formats=tuple(formats.split(",")),
                           on_progress=progress)
    click.echo(f"frames: {summary.frames_written}  final t: {summary.final_time:g} s  "
               f"wall: {summary.wall_time:.1f} s"
               + ("  [INSTABILITY, partial outputs kept]" if summary.instability_flag else ""))
    sys.exit(1 if summary.instability_flag else 0)


# -------------------------------------------------------------- analyze

def _csv_vec(_ctx, _param, value):
    if value is None:
        return None
    parts = value.split(",")
    if len(parts) != 3:
        raise click.BadParameter("expected three comma-separated numbers")
    return [float(p) for p in parts]


@main.command()
@click.argument("tool")
@click.option("--run", "run_dir", type=click.Path(exists=True), required=True,
              help="pipeline output directory")
@click.option("-o", "--out", type=click.Path(), default=None,
              help="artifact directory (default: <run>/analysis)")
@click.option("--args", "args_json", default=None, help="tool arguments as JSON")
@click.option("--preset", default=None)
@click.option("--group", type=int, default=None)
@click.option("--barrier-group", type=int, default=None)
@click.option("--wall-group", type=int, default=None)
@click.option("--mode", default=None)
@click.option("--criterion", default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--plane-point", callback=_csv_vec, default=None, help="x,y,z")
@click.option("--plane-normal", callback=_csv_vec, default=None, help="x,y,z")
@click.option("--base-point", callback=_csv_vec, default=None, help="x,y,z")
@click.option("--band", type=float, default=None)
@click.option("--frame-index", type=int, default=None)
@click.option("--color-by", default=None)
@click.option("--plane", default=None)
def analyze(tool, run_dir, out, args_json, **flags):
    """Run one analysis tool over a finished run."""
    args = {k: v for k, v in flags.items() if v is not None}
    if args_json:
        args.update(json.loads(args_json))
    loaded = load_run(run_dir)
    with open(os.path.join(run_dir, "case_used.xml")) as f:
        c = parse_case(f.read())
    out = out or os.path.join(run_dir, "analysis")
    try:
        result = run_tool(tool, args, loaded, c, out)
    except ToolError as exc:
        raise click.UsageError(str(exc)) from exc
    click.echo(result.summary)
    for name in result.artifacts:
        click.echo(os.path.join(out, name))


@main.command("tools")
def tools_cmd():
    """List the analysis tool registry."""
    click.echo(json.dumps(tool_descriptors(), indent=1))


# -------------------------------------------------------------- session

@main.group()
def session():
    """Interactive sessions: HTTP service or terminal loop."""


@session.command("serve")
@click.option("--port", type=int, default=8008, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--out-root", type=click.Path(), default="./sessions", show_default=True)
@click.option("--planner", default="mock", show_default=True,
              help="mock | mock:<script.json> | http(s)://endpoint")
@click.option("--hitl-cap", type=int, default=5, show_default=True)
def session_serve(port, host, out_root, planner, hitl_cap):
    import uvicorn

    from .service.app import create_app
    app = create_app(out_root, planner_factory=_planner_factory(planner),
                     hitl_cap=hitl_cap)
    uvicorn.run(app, host=host, port=port, log_level="warning")


REPL_HELP = """commands:
  show                 session snapshot
  msg <text>           revision message to the planner (HITL round)
  edit <file>          replace the draft with your own case document
  approve              approve the draft and run the simulation
  restart              discard the draft and start over
  ask <text>           post-processing request
  artifacts            list artifact files
  quit
"""


@session.command("repl")
@click.option("--out-root", type=click.Path(), default="./sessions", show_default=True)
@click.option("--planner", default="mock", show_default=True)
@click.option("--benchmark", default=None, help="builtin name enabling truth validation")
@click.option("--text", default=None, help="initial request text (prompted otherwise)")
@click.option("--hitl-cap", type=int, default=5, show_default=True)
def session_repl(out_root, planner, benchmark, text, hitl_cap):
    """Terminal-driven session: drafting, approval, run, analysis."""
    truth = builtin_truth(benchmark) if benchmark else None
    config = SessionConfig(out_root=out_root, hitl_cap=hitl_cap, truth=truth)
    sess = Session("repl", _planner_factory(planner)(), config)
    sess.on_event = lambda e: click.echo(f"[{e.seq}] {e.kind}: {json.dumps(e.payload)[:200]}")

    if text is None:
        text = click.prompt("describe the scenario")
    sess.start(InputEnvelope(text=text))

    while True:
        try:
            line = click.prompt(f"({sess.phase.value})", prompt_suffix="> ")
        except click.Abort:
            break
        cmd, _, rest = line.partition(" ")
        try:
            if cmd == "quit":
                break
            elif cmd == "help":
                click.echo(REPL_HELP)
            elif cmd == "show":
                click.echo(json.dumps(sess.snapshot(), indent=1))
            elif cmd == "msg":
                sess.hitl_turn(Action(kind="message", text=rest))
            elif cmd == "edit":
                with open(rest.strip()) as f:
                    sess.hitl_turn(Action(kind="direct_edit", xml=f.read()))
            elif cmd == "approve":
                sess.hitl_turn(Action(kind="approve"))
                if sess.phase == Phase.SIMULATING:
                    sess.run_phase2()
            elif cmd == "restart":
                sess.hitl_turn(Action(kind="restart"))
            elif cmd == "ask":
                sess.postproc_request(rest)
            elif cmd == "artifacts":
                for name in sorted(os.listdir(sess.artifacts_dir)):
                    click.echo(name)
            else:
                click.echo(REPL_HELP)
        except ValueError as exc:
            click.echo(f"rejected: {exc}")
    sess.close()


# ----------------------------------------------------------------- eval

def _eval_input(path, builtin_name):
    if path:
        with open(path) as f:
            return f.read()
    with open(evalkit.builtin_dataset_path(builtin_name)) as f:
        return f.read()


@main.group("eval")
def eval_group():
    """Score and aggregate session evaluation records."""


@eval_group.command("geometry")
@click.option("--in", "path", type=click.Path(exists=True), default=None,
              help="geometry records CSV (default: packaged benchmark data)")
@click.option("--cap", type=int, default=5, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def eval_geometry(path, cap, as_json):
    records = evalkit.load_geometry_records(_eval_input(path, "geometry"))
    agg = evalkit.aggregate_geometry(records, cap=cap)
    if as_json:
        click.echo(json.dumps(
            [{"case": c, "modality": m, **cell} for (c, m), cell in agg.items()],
            indent=1))
    else:
        click.echo(evalkit.render_geometry_table(agg), nl=False)


@eval_group.command("tasks")
@click.option("--in", "path", type=click.Path(exists=True), default=None,
              help="task records CSV (default: packaged benchmark data)")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def eval_tasks(path, as_json):
    records = evalkit.load_task_records(_eval_input(path, "tasks"))
    agg = evalkit.aggregate_tasks(records)
    if as_json:
        click.echo(json.dumps(agg, indent=1))
    else:
        click.echo(evalkit.render_task_table(agg), nl=False)


@eval_group.command("pc")
@click.option("--in", "path", type=click.Path(exists=True), default=None)
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
def eval_pc(path, as_json):
    records = evalkit.load_task_records(_eval_input(path, "tasks"))
    strata = evalkit.stratify_by_pc(records)
    if as_json:
        click.echo(json.dumps(
            [{"type": t, "pc": pc, **cell} for (t, pc), cell in strata.items()],
            indent=1))
    else:
        click.echo(evalkit.render_pc_table(strata), nl=False)


if __name__ == "__main__":
    main()
