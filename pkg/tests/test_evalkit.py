import pytest

from sphworkbench.evalkit import (
    GeometryRunRecord,
    TaskInstanceRecord,
    aggregate_geometry,
    aggregate_tasks,
    builtin_dataset_path,
    load_geometry_records,
    load_task_records,
    render_geometry_table,
    render_pc_table,
    render_task_table,
    stratify_by_pc,
)


@pytest.fixture(scope="module")
def task_records():
    with open(builtin_dataset_path("tasks")) as f:
        return load_task_records(f.read())


@pytest.fixture(scope="module")
def geometry_records():
    with open(builtin_dataset_path("geometry")) as f:
        return load_geometry_records(f.read())


class TestRecords:
    def test_zero_shot_with_modes_rejected(self):
        with pytest.raises(ValueError):
            GeometryRunRecord(case_id="C1", modality="text_only", run=1,
                              zero_shot_pass=True, hitl_rounds=0, censored=False,
                              failure_modes=frozenset({"F1"}))

    def test_bad_grade_rejected(self):
        with pytest.raises(ValueError):
            TaskInstanceRecord(case_id="C1", task_id="T1", cognitive_type="scalar",
                               run=1, pc=2, ac="X")

    def test_dataset_sizes(self, task_records, geometry_records):
        assert len(task_records) == 57      # 19 tasks x 3 runs
        assert len(geometry_records) == 33  # 11 table cells x 3 runs


class TestTaskAggregation:
    def test_table_golden_counts(self, task_records):
        agg = aggregate_tasks(task_records)
        assert agg["scalar"] == {"n": 12, "A": 9, "B": 3, "C": 0, "F": 0, "pass_pct": 100}
        assert agg["visual"] == {"n": 12, "A": 11, "B": 1, "C": 0, "F": 0, "pass_pct": 100}
        assert agg["group"] == {"n": 15, "A": 9, "B": 2, "C": 4, "F": 0, "pass_pct": 73}
        assert agg["phys"] == {"n": 6, "A": 3, "B": 0, "C": 3, "F": 0, "pass_pct": 50}
        assert agg["geodis"] == {"n": 12, "A": 3, "B": 0, "C": 9, "F": 0, "pass_pct": 25}

    def test_counts_partition_total(self, task_records):
        agg = aggregate_tasks(task_records)
        assert sum(cell["n"] for cell in agg.values()) == len(task_records)
        for cell in agg.values():
            assert cell["A"] + cell["B"] + cell["C"] + cell["F"] == cell["n"]
            assert 0 <= cell["pass_pct"] <= 100

    def test_empty_input_empty_report(self):
        assert aggregate_tasks([]) == {}
        assert stratify_by_pc([]) == {}

    def test_single_a_record(self):
        rec = TaskInstanceRecord(case_id="C9", task_id="T1", cognitive_type="phys",
                                 run=1, pc=1, ac="A")
        assert aggregate_tasks([rec])["phys"]["pass_pct"] == 100


class TestPcStrata:
    def test_strata_golden(self, task_records):
        strata = stratify_by_pc(task_records)
        assert strata[("geodis", 2)] == {"n": 5, "pass_pct": 60}
        assert strata[("geodis", 3)] == {"n": 7, "pass_pct": 0}
        for pc in (1, 2, 3):
            assert strata[("scalar", pc)]["pass_pct"] == 100
        assert strata[("group", 2)] == {"n": 11, "pass_pct": 73}
        assert strata[("group", 3)] == {"n": 3, "pass_pct": 67}
        assert strata[("phys", 2)] == {"n": 5, "pass_pct": 60}

    def test_empty_cells_omitted(self, task_records):
        strata = stratify_by_pc(task_records)
        assert ("visual", 1) not in strata   # no PC=1 visual instances exist

    def test_single_record_cell_extremes(self):
        rec = TaskInstanceRecord(case_id="C9", task_id="T1", cognitive_type="visual",
                                 run=1, pc=3, ac="F")
        assert stratify_by_pc([rec])[("visual", 3)]["pass_pct"] == 0


class TestGeometryAggregation:
    def test_table_golden_cells(self, geometry_records):
        agg = aggregate_geometry(geometry_records)
        c1_img = agg[("C1", "image_text")]
        assert c1_img["zero_shot"] == "2/3"
        assert c1_img["rounds_display"] == "0.33"
        c1_txt = agg[("C1", "text_only")]
        assert c1_txt["zero_shot"] == "0/3"
        assert c1_txt["rounds_display"] == "1.33"
        assert agg[("C3", "text_only")]["rounds_display"] == ">=5"
        assert agg[("C3", "image_text")]["rounds_display"] == ">=5"
        assert agg[("C4", "text_only")]["rounds_display"] == ">=5"
        assert agg[("C4*", "image_text")]["rounds_display"] == "4"
        assert agg[("C5", "text_only")]["rounds_display"] == "1.67"
        assert agg[("C5", "image_text")]["rounds_display"] == "2.33"

    def test_censored_excluded_from_mean(self):
        recs = [
            GeometryRunRecord("X", "text_only", 1, False, 2, False, frozenset({"F1"})),
            GeometryRunRecord("X", "text_only", 2, False, 5, True, frozenset({"F1"})),
        ]
        cell = aggregate_geometry(recs)[("X", "text_only")]
        assert cell["mean_rounds"] == 2.0
        assert "censored" in cell["rounds_display"]

    def test_empty_cell_absent(self):
        agg = aggregate_geometry([])
        assert agg == {}


class TestRendering:
    def test_tables_render(self, task_records, geometry_records):
        assert "100%" in render_task_table(aggregate_tasks(task_records))
        assert ">=5" in render_geometry_table(aggregate_geometry(geometry_records))
        assert "PC" in render_pc_table(stratify_by_pc(task_records))
