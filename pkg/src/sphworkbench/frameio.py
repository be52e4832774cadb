"""Frame files: CSV and VTK legacy ASCII exports, manifest, run loading.

CSV columns are exactly id,kind,group,x,y,z,vx,vy,vz,rho,p,mass with a
header row, LF line endings and '.' decimals.  Floats use shortest
round-trip formatting, so re-importing a CSV reproduces the frame bit
for bit and repeated exports are byte-identical.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .particles import KIND_CODES, KIND_NAMES, ParticleFrame

__all__ = [
    "CSV_HEADER",
    "frame_to_csv",
    "frame_from_csv",
    "frame_to_vtk",
    "write_manifest",
    "read_manifest",
    "frame_name",
    "LoadedRun",
    "load_run",
]

CSV_HEADER = "id,kind,group,x,y,z,vx,vy,vz,rho,p,mass"


def _f(x: float) -> str:
    return repr(float(x))


def frame_to_csv(frame: ParticleFrame) -> str:
    rows = [CSV_HEADER]
    for k in range(frame.n):
        p, v = frame.pos[k], frame.vel[k]
        rows.append(",".join((
            str(int(frame.ids[k])),
            KIND_NAMES[int(frame.kind[k])],
            str(int(frame.group[k])),
            _f(p[0]), _f(p[1]), _f(p[2]),
            _f(v[0]), _f(v[1]), _f(v[2]),
            _f(frame.rho[k]), _f(frame.p[k]), _f(frame.mass[k]),
        )))
    return "\n".join(rows) + "\n"


def frame_from_csv(text: str, time: float = 0.0) -> ParticleFrame:
    lines = text.strip().split("\n")
    if lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {lines[0]!r}")
    n = len(lines) - 1
    ids = np.empty(n, dtype=np.int64)
    kind = np.empty(n, dtype=np.int8)
    group = np.empty(n, dtype=np.int64)
    pos = np.empty((n, 3))
    vel = np.empty((n, 3))
    rho = np.empty(n)
    p = np.empty(n)
    mass = np.empty(n)
    for k, line in enumerate(lines[1:]):
        parts = line.split(",")
        ids[k] = int(parts[0])
        kind[k] = KIND_CODES[parts[1]]
        group[k] = int(parts[2])
        pos[k] = [float(parts[3]), float(parts[4]), float(parts[5])]
        vel[k] = [float(parts[6]), float(parts[7]), float(parts[8])]
        rho[k] = float(parts[9])
        p[k] = float(parts[10])
        mass[k] = float(parts[11])
    return ParticleFrame(time=time, ids=ids, kind=kind, group=group,
                         pos=pos, vel=vel, rho=rho, p=p, mass=mass)


def frame_to_vtk(frame: ParticleFrame) -> str:
    """VTK legacy ASCII POLYDATA: points as vertices with per-point fields."""
    n = frame.n
    out = [
        "# vtk DataFile Version 3.0",
        f"particle frame t={_f(frame.time)}",
        "ASCII",
        "DATASET POLYDATA",
        f"POINTS {n} double",
    ]
    for k in range(n):
        p = frame.pos[k]
        out.append(f"{_f(p[0])} {_f(p[1])} {_f(p[2])}")
    out.append(f"VERTICES {n} {2 * n}")
    for k in range(n):
        out.append(f"1 {k}")
    out.append(f"POINT_DATA {n}")
    out.append("SCALARS kind int 1")
    out.append("LOOKUP_TABLE default")
    out.extend(str(int(v)) for v in frame.kind)
    out.append("SCALARS group int 1")
    out.append("LOOKUP_TABLE default")
    out.extend(str(int(v)) for v in frame.group)
    for name, arr in (("rho", frame.rho), ("pressure", frame.p), ("mass", frame.mass)):
        out.append(f"SCALARS {name} double 1")
        out.append("LOOKUP_TABLE default")
        out.extend(_f(v) for v in arr)
    out.append("VECTORS velocity double")
    for k in range(n):
        v = frame.vel[k]
        out.append(f"{_f(v[0])} {_f(v[1])} {_f(v[2])}")
    return "\n".join(out) + "\n"


def frame_name(index: int, fmt: str) -> str:
    return f"frame_{index:04d}.{fmt}"


def write_manifest(path: str, times: list[float]) -> None:
    with open(path, "w", newline="\n") as f:
        for i, t in enumerate(times):
            f.write(f"{i:04d} {_f(t)}\n")


def read_manifest(path: str) -> list[float]:
    times = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                times.append(float(line.split()[1]))
    return times


@dataclass
class LoadedRun:
    """All frames of one pipeline run, in memory."""

    directory: str
    times: list[float]
    frames: list[ParticleFrame]

    @property
    def n_frames(self) -> int:
        return len(self.frames)


def load_run(directory: str) -> LoadedRun:
    manifest = os.path.join(directory, "manifest.txt")
    times = read_manifest(manifest)
    frames = []
    for i, t in enumerate(times):
        path = os.path.join(directory, frame_name(i, "csv"))
        with open(path) as f:
            frames.append(frame_from_csv(f.read(), time=t))
    return LoadedRun(directory=directory, times=times, frames=frames)
