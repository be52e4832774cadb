"""CLI adapter equivalence: every command reproduces the module operation."""

import json
import os

import pytest
from click.testing import CliRunner

from sphworkbench.casedef import validate_semantics
from sphworkbench.casexml import emit_case, parse_case
from sphworkbench.cases import builtin_case, builtin_truth
from sphworkbench.cli import main
from sphworkbench.evalkit import (
    aggregate_tasks,
    builtin_dataset_path,
    load_task_records,
    render_task_table,
)
from sphworkbench.frameio import load_run
from sphworkbench.particles import generate_particles
from sphworkbench.postproc import run_tool

from conftest import shorten
from test_validation import seed_f3


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def c1_file(tmp_path):
    path = tmp_path / "c1.xml"
    path.write_text(emit_case(builtin_case("c1")))
    return str(path)


class TestCaseCommands:
    def test_validate_ok(self, runner, c1_file):
        result = runner.invoke(main, ["case", "validate", c1_file])
        assert result.exit_code == 0
        assert "ok" in result.output

    def test_validate_findings_exit_1(self, runner, tmp_path):
        bad = emit_case(builtin_case("c1")).replace('tau_y="5.0"', 'tau_y="-5.0"')
        path = tmp_path / "bad.xml"
        path.write_text(bad)
        result = runner.invoke(main, ["case", "validate", str(path)])
        assert result.exit_code == 1
        assert "negative_yield_stress" in result.output

    def test_validate_parse_error_exit_1(self, runner, tmp_path):
        path = tmp_path / "broken.xml"
        path.write_text("<case dimensionality='2'><geometry>")
        result = runner.invoke(main, ["case", "validate", str(path)])
        assert result.exit_code == 1
        assert "parse error" in result.output

    def test_emit_matches_module(self, runner, c1_file):
        result = runner.invoke(main, ["case", "emit", c1_file])
        assert result.exit_code == 0
        assert result.output == emit_case(builtin_case("c1"))

    def test_diff_identical(self, runner, c1_file):
        result = runner.invoke(main, ["case", "diff", c1_file, c1_file])
        assert result.exit_code == 0

    def test_diff_dimension_exit_1(self, runner, tmp_path, c1_file):
        cand = builtin_case("c1").with_primitive(1, extents=(0.45, 0.0, 0.3))
        cand_path = tmp_path / "cand.xml"
        cand_path.write_text(emit_case(cand))
        result = runner.invoke(main, ["case", "diff", c1_file, str(cand_path)])
        assert result.exit_code == 1
        assert "dimension" in result.output


class TestGenAndCheck:
    def test_gen_writes_frame_and_preview(self, runner, tmp_path, c1_file):
        out = tmp_path / "gen"
        result = runner.invoke(main, ["gen", c1_file, "-o", str(out)])
        assert result.exit_code == 0
        assert (out / "frame_0000.csv").exists()
        assert (out / "preview.svg").exists()
        n_module = generate_particles(builtin_case("c1")).n
        assert str(n_module) in result.output

    def test_check_clean_exit_0(self, runner, c1_file):
        result = runner.invoke(main, ["check", c1_file, "--truth", "builtin:c1"])
        assert result.exit_code == 0
        assert "PASS" in result.output

    def test_check_seeded_f3_exit_1(self, runner, tmp_path):
        seeded = seed_f3(builtin_case("c1"))
        path = tmp_path / "f3.xml"
        path.write_text(emit_case(seeded))
        result = runner.invoke(main, ["check", str(path), "--truth", "builtin:c1"])
        assert result.exit_code == 1
        assert "F3" in result.output

    def test_check_malformed_reports_f5(self, runner, tmp_path):
        path = tmp_path / "broken.xml"
        path.write_text("<case dimensionality='2'><geometry>")
        result = runner.invoke(main, ["check", str(path), "--truth", "builtin:c1"])
        assert result.exit_code == 1
        assert "F5" in result.output

    def test_check_with_truth_file(self, runner, tmp_path, c1_file):
        truth_path = tmp_path / "truth.json"
        truth_path.write_text(builtin_truth("c1").to_json())
        result = runner.invoke(main, ["check", c1_file, "--truth", str(truth_path)])
        assert result.exit_code == 0


class TestRunAndAnalyze:
    def test_run_then_analyze_mass_flux(self, runner, tmp_path, c1_short_case):
        case = shorten(c1_short_case, t_end=0.2)
        case_path = tmp_path / "case.xml"
        case_path.write_text(emit_case(case))
        out = tmp_path / "run"
        result = runner.invoke(main, ["run", str(case_path), "-o", str(out),
                                      "--formats", "csv", "--quiet"])
        assert result.exit_code == 0, result.output
        result = runner.invoke(main, [
            "analyze", "mass_flux", "--run", str(out),
            "--plane-point", "0.5,0,0", "--plane-normal", "1,0,0"])
        assert result.exit_code == 0, result.output
        assert (out / "analysis" / "mass_flux.csv").exists()

    def test_analyze_equals_module_call(self, runner, c1_short_run, c1_short_case,
                                        tmp_path):
        result = runner.invoke(main, [
            "analyze", "scalar_series", "--run", c1_short_run,
            "--preset", "front_position", "-o", str(tmp_path / "cli")])
        assert result.exit_code == 0, result.output
        loaded = load_run(c1_short_run)
        module_result = run_tool("scalar_series", {"preset": "front_position"},
                                 loaded, c1_short_case, str(tmp_path / "mod"))
        cli_bytes = (tmp_path / "cli" / module_result.artifacts[0]).read_bytes()
        mod_bytes = (tmp_path / "mod" / module_result.artifacts[0]).read_bytes()
        assert cli_bytes == mod_bytes

    def test_analyze_unknown_tool_usage_error(self, runner, c1_short_run):
        result = runner.invoke(main, ["analyze", "wat", "--run", c1_short_run])
        assert result.exit_code == 2

    def test_tools_listing(self, runner):
        result = runner.invoke(main, ["tools"])
        assert result.exit_code == 0
        names = {d["name"] for d in json.loads(result.output)}
        assert "mass_flux" in names


class TestEvalCommands:
    def test_eval_tasks_matches_module(self, runner):
        result = runner.invoke(main, ["eval", "tasks"])
        assert result.exit_code == 0
        with open(builtin_dataset_path("tasks")) as f:
            records = load_task_records(f.read())
        assert result.output == render_task_table(aggregate_tasks(records))

    def test_eval_tasks_from_file(self, runner, tmp_path):
        result = runner.invoke(main, ["eval", "tasks", "--in",
                                      builtin_dataset_path("tasks")])
        assert "100%" in result.output

    def test_eval_geometry(self, runner):
        result = runner.invoke(main, ["eval", "geometry"])
        assert result.exit_code == 0
        assert ">=5" in result.output
        assert "2/3" in result.output

    def test_eval_pc(self, runner):
        result = runner.invoke(main, ["eval", "pc"])
        assert result.exit_code == 0
        assert "60%" in result.output


class TestRepl:
    def test_scripted_repl_session(self, runner, tmp_path, c1_short_case):
        # drive a complete phase 1 -> 3 session through the terminal loop
        xml_path = tmp_path / "edit.xml"
        xml_path.write_text(emit_case(shorten(c1_short_case, t_end=0.1)))
        commands = "\n".join([
            "show",
            f"edit {xml_path}",
            "approve",
            "ask run-off distance please",
            "artifacts",
            "quit",
        ]) + "\n"
        result = runner.invoke(main, [
            "session", "repl", "--out-root", str(tmp_path / "sessions"),
            "--text", "dam break"], input=commands)
        assert result.exit_code == 0, result.output
        assert "run_completed" in result.output
        assert "tool_result" in result.output
