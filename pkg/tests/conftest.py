import dataclasses
import os

import pytest

from sphworkbench.cases import builtin_case, builtin_truth
from sphworkbench.casexml import emit_case
from sphworkbench.pipeline import run_pipeline
from sphworkbench.frameio import load_run


def shorten(case, t_end=0.3, interval=0.1):
    return dataclasses.replace(
        case, controls=dataclasses.replace(case.controls, t_end=t_end,
                                           output_interval=interval))


@pytest.fixture(scope="session")
def c1_case():
    return builtin_case("c1")


@pytest.fixture(scope="session")
def c1_truth():
    return builtin_truth("c1")


@pytest.fixture(scope="session")
def c1_short_case(c1_case):
    return shorten(c1_case)


@pytest.fixture(scope="session")
def c1_short_run(tmp_path_factory, c1_short_case):
    """One short C1 pipeline run shared by postproc/CLI/service tests."""
    out = tmp_path_factory.mktemp("c1run")
    summary = run_pipeline(c1_short_case, str(out), formats=("csv", "vtk"))
    assert not summary.instability_flag
    return str(out)


@pytest.fixture(scope="session")
def c1_short_loaded(c1_short_run):
    return load_run(c1_short_run)


@pytest.fixture(scope="session")
def c1_short_xml(c1_short_case):
    return emit_case(c1_short_case)
