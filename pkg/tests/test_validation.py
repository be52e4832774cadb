"""Failure-mode detector suite: seeded single defects trigger exactly their
own class; clean fixtures trigger nothing."""

import dataclasses

import numpy as np
import pytest

from sphworkbench.cases import builtin_case, builtin_truth
from sphworkbench.casedef import Frame
from sphworkbench.casexml import ParseError, emit_case, parse_case
from sphworkbench.particles import KIND_FLUID, generate_particles
from sphworkbench.validation import (
    GroundTruthSpec,
    ValidationReport,
    check_boundary_thickness,
    check_dimensions,
    check_frames,
    check_interface,
    check_structure,
    validate_all,
)

# ------------------------------------------------------------ seed helpers


def seed_f1(case):
    """Wrong dimension: debris drawn wider than specified."""
    return case.with_primitive(1, extents=(0.45, 0.0, 0.3))


def seed_f2(case, frame):
    """Interface defect: fluid shifted into the left wall (frame mutation:
    regenerating such a case would be rejected as ill-posed)."""
    mutated = frame.copy()
    shift = 0.8 * case.numerics.dp
    fluid = mutated.kind == KIND_FLUID
    mutated.pos[fluid, 0] -= shift
    return mutated


def seed_f3(case):
    """Single-layer wall."""
    return case.with_primitive(11, layers=1)


def seed_f4(case):
    """Slope-aligned debris drawn axis-aligned instead."""
    prim = case.primitive_for(1)
    return case.with_primitive(
        1, local_frame=dataclasses.replace(prim.local_frame, rotations=()))


def seed_f6(case):
    """Missing component: drop the barrier."""
    prims = tuple(p for p in case.primitives if p.group_id != 20)
    return dataclasses.replace(case, primitives=prims)


def report_for(case, truth):
    frame = generate_particles(case)
    return validate_all(case, frame, truth)


# ------------------------------------------------------------------ tests


class TestCleanFixtures:
    @pytest.mark.parametrize("name", ["c1", "c2", "c3", "c4", "c5"])
    def test_no_false_positives(self, name):
        case = builtin_case(name)
        report = report_for(case, builtin_truth(name))
        assert report.passed, report.to_text()


class TestSeededDefects:
    def test_f1_alone(self):
        report = report_for(seed_f1(builtin_case("c1")), builtin_truth("c1"))
        assert report.modes == {"F1"}
        assert "delta" in report.findings[0].evidence

    def test_f1_reference_magnitude(self):
        # candidate says 0.45 where truth says 0.40 +/- 0.01
        findings = check_dimensions(seed_f1(builtin_case("c1")), builtin_truth("c1"))
        assert len(findings) == 1
        assert "+0.05" in findings[0].evidence

    def test_f1_inside_tolerance_silent(self):
        case = builtin_case("c1").with_primitive(1, extents=(0.405, 0.0, 0.3))
        assert check_dimensions(case, builtin_truth("c1")) == []

    def test_f2_alone(self):
        case = builtin_case("c1")
        frame = seed_f2(case, generate_particles(case))
        report = validate_all(case, frame, builtin_truth("c1"))
        assert report.modes == {"F2"}
        assert "penetration" in report.findings[0].evidence

    def test_f2_gap_variant(self):
        case = builtin_case("c1")
        frame = generate_particles(case).copy()
        fluid = frame.kind == KIND_FLUID
        frame.pos[fluid, 0] += 3 * case.numerics.dp  # pull off the left wall
        report = validate_all(case, frame, builtin_truth("c1"))
        assert report.modes == {"F2"}
        assert any("gap" in f.evidence for f in report.findings)

    def test_f3_alone(self):
        report = report_for(seed_f3(builtin_case("c1")), builtin_truth("c1"))
        assert report.modes == {"F3"}
        assert "1 particle row" in report.findings[0].evidence

    def test_f3_measured_count(self):
        case = builtin_case("c1").with_primitive(11, layers=3)
        frame = generate_particles(case)
        findings = check_boundary_thickness(case, frame, case.numerics)
        assert len(findings) == 1
        assert "3 particle row(s)" in findings[0].evidence
        assert "needs 4" in findings[0].evidence

    def test_f3_sufficient_layers_silent(self):
        case = builtin_case("c1")
        frame = generate_particles(case)
        assert check_boundary_thickness(case, frame, case.numerics) == []

    def test_f4_alone(self):
        report = report_for(seed_f4(builtin_case("c4")), builtin_truth("c4"))
        assert report.modes == {"F4"}
        assert "rotated" in report.findings[0].evidence

    def test_f4_translation_variant(self):
        case = builtin_case("c4")
        prim = case.primitive_for(1)
        shifted = case.with_primitive(
            1, local_frame=dataclasses.replace(
                prim.local_frame,
                origin=(prim.local_frame.origin[0] + 0.05,
                        prim.local_frame.origin[1],
                        prim.local_frame.origin[2])))
        findings = check_frames(shifted, builtin_truth("c4"))
        assert [f.mode for f in findings] == ["F4"]
        assert "origin off" in findings[0].evidence

    def test_f6_alone(self):
        report = report_for(seed_f6(builtin_case("c2")), builtin_truth("c2"))
        assert report.modes == {"F6"}
        assert "missing" in report.findings[0].evidence

    def test_f6_wrong_type(self):
        case = builtin_case("c2")
        prim = case.primitive_for(20)
        swapped = case.with_primitive(20, role="floating_body", layers=None,
                                      mass_density=500.0)
        findings = check_structure(swapped, builtin_truth("c2"))
        assert [f.mode for f in findings] == ["F6"]
        assert "wrong type" in findings[0].evidence

    def test_multi_seed_c4(self):
        case = builtin_case("c4")
        case = case.with_primitive(10, layers=1)          # F3 on the slope wall
        case = seed_f4(case)                              # F4 on the debris
        case = dataclasses.replace(                       # F6: bed phase missing
            case, primitives=tuple(p for p in case.primitives if p.group_id != 2))
        report = report_for(case, builtin_truth("c4"))
        assert report.modes == {"F3", "F4", "F6"}

    def test_f5_short_circuits(self):
        try:
            parse_case("<case dimensionality='2'><geometry>")
        except ParseError as exc:
            report = validate_all(None, None, builtin_truth("c1"), parse_error=exc)
        assert report.modes == {"F5"}
        assert len(report.findings) == 1


class TestReportPlumbing:
    def test_passed_iff_empty(self):
        assert ValidationReport([]).passed
        report = report_for(seed_f1(builtin_case("c1")), builtin_truth("c1"))
        assert not report.passed

    def test_text_and_records(self):
        report = report_for(seed_f3(builtin_case("c1")), builtin_truth("c1"))
        text = report.to_text()
        assert text.startswith("F3")
        records = report.to_records()
        assert records[0]["mode"] == "F3"
        assert ValidationReport([]).to_text() == "PASS: no findings\n"

    def test_determinism(self):
        case = seed_f1(builtin_case("c1"))
        truth = builtin_truth("c1")
        frame = generate_particles(case)
        a = validate_all(case, frame, truth)
        b = validate_all(case, frame, truth)
        assert a.to_records() == b.to_records()

    def test_truth_json_round_trip(self):
        truth = builtin_truth("c4")
        back = GroundTruthSpec.from_json(truth.to_json())
        assert back == truth
