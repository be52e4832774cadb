"""Session scoring and aggregation.

Two record kinds come in as flat CSVs (annotators can produce them by
hand): geometry-run records (zero-shot flag, HITL rounds with censoring,
failure modes) and task-instance records (cognitive type, prompt clarity
PC 1-3, capability grade AC in {A, B, C, F}).  A task passes when its grade
is A or B.  Censored round counts (sessions cut off at the interaction
cap) are excluded from means and rendered as ">=cap".
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

__all__ = [
    "GeometryRunRecord",
    "TaskInstanceRecord",
    "load_geometry_records",
    "load_task_records",
    "builtin_dataset_path",
    "aggregate_geometry",
    "aggregate_tasks",
    "stratify_by_pc",
    "render_geometry_table",
    "render_task_table",
    "render_pc_table",
]

COGNITIVE_TYPES = ("scalar", "visual", "group", "phys", "geodis")
GRADES = ("A", "B", "C", "F")
PASS_GRADES = ("A", "B")
MODALITIES = ("text_only", "image_text")


@dataclass(frozen=True)
class GeometryRunRecord:
    case_id: str
    modality: str
    run: int
    zero_shot_pass: bool
    hitl_rounds: int
    censored: bool
    failure_modes: frozenset[str]

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise ValueError(f"modality must be in {MODALITIES}, got {self.modality!r}")
        if self.zero_shot_pass and self.failure_modes:
            raise ValueError("a zero-shot pass cannot carry failure modes")


@dataclass(frozen=True)
class TaskInstanceRecord:
    case_id: str
    task_id: str
    cognitive_type: str
    run: int
    pc: int
    ac: str

    def __post_init__(self):
        if self.cognitive_type not in COGNITIVE_TYPES:
            raise ValueError(f"unknown cognitive type {self.cognitive_type!r}")
        if self.pc not in (1, 2, 3):
            raise ValueError("pc must be 1, 2 or 3")
        if self.ac not in GRADES:
            raise ValueError(f"ac must be one of {GRADES}")

    @property
    def passed(self) -> bool:
        return self.ac in PASS_GRADES


def load_geometry_records(text: str) -> list[GeometryRunRecord]:
    records = []
    for row in csv.DictReader(io.StringIO(text)):
        modes = frozenset(m for m in row["failure_modes"].split("|") if m)
        records.append(GeometryRunRecord(
            case_id=row["case"], modality=row["modality"], run=int(row["run"]),
            zero_shot_pass=row["zero_shot_pass"].lower() == "true",
            hitl_rounds=int(row["hitl_rounds"]),
            censored=row["censored"].lower() == "true",
            failure_modes=modes))
    return records


def load_task_records(text: str) -> list[TaskInstanceRecord]:
    records = []
    for row in csv.DictReader(io.StringIO(text)):
        records.append(TaskInstanceRecord(
            case_id=row["case"], task_id=row["task"],
            cognitive_type=row["type"], run=int(row["run"]),
            pc=int(row["pc"]), ac=row["ac"]))
    return records


def builtin_dataset_path(name: str) -> str:
    """Path of a packaged benchmark dataset: 'geometry' or 'tasks'."""
    fname = {"geometry": "table1_geometry.csv", "tasks": "table2_tasks.csv"}[name]
    return str(resources.files("sphworkbench.data") / fname)


def _pct(passed: int, total: int) -> int:
    return int(100.0 * passed / total + 0.5)


def aggregate_geometry(records: list[GeometryRunRecord], cap: int = 5) -> dict:
    """Per (case, modality): zero-shot pass rate and mean HITL rounds.

    Empty cells are absent from the result, never reported as zero.
    """
    cells: dict[tuple[str, str], list[GeometryRunRecord]] = {}
    for rec in records:
        cells.setdefault((rec.case_id, rec.modality), []).append(rec)

    out = {}
    for key in sorted(cells):
        recs = cells[key]
        n = len(recs)
        passes = sum(r.zero_shot_pass for r in recs)
        uncensored = [r.hitl_rounds for r in recs if not r.censored]
        censored = n - len(uncensored)
        if uncensored:
            mean = sum(uncensored) / len(uncensored)
            display = f"{mean:.2f}".rstrip("0").rstrip(".")
            if censored:
                display += f" (+{censored} censored)"
        else:
            mean = None
            display = f">={cap}"
        out[key] = {
            "n": n,
            "zero_shot": f"{passes}/{n}",
            "pass_rate": passes / n,
            "mean_rounds": mean,
            "rounds_display": display,
            "censored": censored,
        }
    return out


def aggregate_tasks(records: list[TaskInstanceRecord]) -> dict:
    """Per cognitive type: n, per-grade counts, pass rate (A+B, whole percent)."""
    out = {}
    for ctype in COGNITIVE_TYPES:
        recs = [r for r in records if r.cognitive_type == ctype]
        if not recs:
            continue
        counts = {g: sum(r.ac == g for r in recs) for g in GRADES}
        passed = counts["A"] + counts["B"]
        out[ctype] = {"n": len(recs), **counts, "pass_pct": _pct(passed, len(recs))}
    return out


def stratify_by_pc(records: list[TaskInstanceRecord]) -> dict:
    """Per (cognitive type, PC): n and pass rate; cells with n = 0 omitted."""
    out = {}
    for ctype in COGNITIVE_TYPES:
        for pc in (1, 2, 3):
            recs = [r for r in records
                    if r.cognitive_type == ctype and r.pc == pc]
            if not recs:
                continue
            passed = sum(r.passed for r in recs)
            out[(ctype, pc)] = {"n": len(recs), "pass_pct": _pct(passed, len(recs))}
    return out


TYPE_LABELS = {
    "scalar": "Scalar / curve extraction",
    "visual": "Visualization & rendering",
    "group": "Group / phase identification",
    "phys": "Physical quantity derivation",
    "geodis": "Geometric disambiguation",
}


def render_geometry_table(agg: dict) -> str:
    lines = [f"{'case':8} {'modality':12} {'zero-shot':>9} {'rounds':>12}"]
    for (case_id, modality), cell in agg.items():
        lines.append(f"{case_id:8} {modality:12} {cell['zero_shot']:>9} "
                     f"{cell['rounds_display']:>12}")
    return "\n".join(lines) + "\n"


def render_task_table(agg: dict) -> str:
    lines = [f"{'cognitive type':30} {'n':>3} {'A':>3} {'B':>3} {'C':>3} {'F':>3} {'pass':>5}"]
    for ctype, cell in agg.items():
        lines.append(
            f"{TYPE_LABELS[ctype]:30} {cell['n']:>3} {cell['A']:>3} {cell['B']:>3} "
            f"{cell['C']:>3} {cell['F']:>3} {cell['pass_pct']:>4}%")
    return "\n".join(lines) + "\n"


def render_pc_table(strata: dict) -> str:
    lines = [f"{'cognitive type':30} {'PC':>3} {'n':>3} {'pass':>5}"]
    for (ctype, pc), cell in strata.items():
        lines.append(f"{TYPE_LABELS[ctype]:30} {pc:>3} {cell['n']:>3} "
                     f"{cell['pass_pct']:>4}%")
    return "\n".join(lines) + "\n"
