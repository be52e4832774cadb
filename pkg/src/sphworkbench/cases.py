"""Built-in desk-scale benchmark cases.

C1  2D rectangular debris collapse and run-out in a tank
C2  3D debris collapse against a fixed barrier with side gaps
C3  3D debris released down an inclined trench onto a flat deposition floor
C4  2D debris running down a slope onto an erodible second phase
C5  C2 with the barrier replaced by six floating blocks

Walls extend past interior corners by their own thickness so lattices seal
without overlapping; fluid drawn sharing a face with a wall gets the
canonical dp separation automatically.
"""

from __future__ import annotations

import math

from .casedef import (
    CaseDefinition,
    Frame,
    GeometryPrimitive,
    MaterialSpec,
    NumericalSpec,
    RunControls,
)
from .solver.core import default_sound_speed
from .validation import GroundTruthSpec

__all__ = ["builtin_case", "builtin_truth", "BUILTIN_CASES"]

G = 9.81


def _box(group, origin, extents, role="fluid", rotations=(), layers=None, mass_density=None):
    return GeometryPrimitive(
        kind="box", role=role, group_id=group,
        local_frame=Frame(origin=origin, rotations=tuple(rotations)),
        extents=extents, layers=layers, mass_density=mass_density)


def _wall(group, origin, extents, layers, wetted=1, rotations=()):
    return GeometryPrimitive(
        kind="plane_wall", role="fixed_boundary", group_id=group,
        local_frame=Frame(origin=origin, rotations=tuple(rotations)),
        extents=extents, layers=layers, wetted_sign=wetted)


def c1_case() -> CaseDefinition:
    dp = 0.02
    layers = 4
    ext = layers * dp
    length, height = 1.6, 0.6
    return CaseDefinition(
        dimensionality=2,
        gravity=(0.0, 0.0, -G),
        primitives=(
            _box(1, (0.0, 0.0, 0.0), (0.4, 0.0, 0.3)),
            _wall(10, (-ext, 0.0, 0.0), (length + 2 * ext, 0.0, 0.0), layers),
            _wall(11, (0.0, 0.0, 0.0), (0.0, 0.0, height), layers),
            _wall(12, (length, 0.0, 0.0), (0.0, 0.0, height), layers, wetted=-1),
        ),
        materials=(MaterialSpec(group_id=1, rho0=1500.0, mu=0.5, n=1.0,
                                tau_y=5.0, m_papanastasiou=20.0),),
        numerics=NumericalSpec(dp=dp, cs=default_sound_speed(G, 0.3), alpha=0.0,
                               cfl=0.3, h_coef=1.2),
        controls=RunControls(t_end=2.0, output_interval=0.1, seed=0),
    )


def _channel_walls(dp: float, layers: int, length: float, width: float, height: float):
    ext = layers * dp
    return (
        _wall(10, (-ext, -ext, 0.0), (length + 2 * ext, width + 2 * ext, 0.0), layers),
        _wall(11, (0.0, -ext, 0.0), (0.0, width + 2 * ext, height), layers),
        _wall(12, (length, -ext, 0.0), (0.0, width + 2 * ext, height), layers, wetted=-1),
        _wall(13, (0.0, 0.0, 0.0), (length, 0.0, height), layers),
        _wall(14, (0.0, width, 0.0), (length, 0.0, height), layers, wetted=-1),
    )


def c2_case() -> CaseDefinition:
    dp = 0.025
    layers = 4
    length, width, height = 1.0, 0.3, 0.3
    return CaseDefinition(
        dimensionality=3,
        gravity=(0.0, 0.0, -G),
        primitives=(
            _box(1, (0.0, 0.0, 0.0), (0.2, 0.3, 0.25)),
            *_channel_walls(dp, layers, length, width, height),
            _box(20, (0.55, 0.06, 0.0), (0.1, 0.18, 0.12),
                 role="fixed_boundary", layers=layers),
        ),
        materials=(MaterialSpec(group_id=1, rho0=1500.0, mu=0.3, n=1.0,
                                tau_y=2.0, m_papanastasiou=10.0),),
        numerics=NumericalSpec(dp=dp, cs=default_sound_speed(G, 0.25), alpha=0.0,
                               cfl=0.3, h_coef=1.0),
        controls=RunControls(t_end=1.0, output_interval=0.05, seed=0),
    )


def c3_case() -> CaseDefinition:
    dp = 0.025
    layers = 4
    ext = layers * dp
    slope = ("y", 30.0)
    return CaseDefinition(
        dimensionality=3,
        gravity=(0.0, 0.0, -G),
        primitives=(
            # debris sits on the slope, defined in the slope-aligned frame
            _box(1, (0.05 * math.cos(math.radians(30.0)), 0.0,
                     0.3 - 0.05 * math.sin(math.radians(30.0))),
                 (0.25, 0.25, 0.1), rotations=(slope,)),
            _wall(10, (0.0, -ext, 0.3), (0.6, 0.25 + 2 * ext, 0.0), layers,
                  rotations=(slope,)),
            _wall(11, (0.0, 0.0, 0.3), (0.6, 0.0, 0.12), layers, rotations=(slope,)),
            _wall(12, (0.0, 0.25, 0.3), (0.6, 0.0, 0.12), layers, wetted=-1,
                  rotations=(slope,)),
            _wall(13, (0.52, -0.25, 0.0), (0.6, 0.75, 0.0), layers),
        ),
        materials=(MaterialSpec(group_id=1, rho0=1600.0, mu=0.4, n=1.1,
                                tau_y=3.0, m_papanastasiou=15.0),),
        numerics=NumericalSpec(dp=dp, cs=default_sound_speed(G, 0.35), alpha=0.0,
                               cfl=0.3, h_coef=1.0),
        controls=RunControls(t_end=1.0, output_interval=0.05, seed=0),
    )


def c4_case() -> CaseDefinition:
    dp = 0.0125
    layers = 4
    slope = ("y", 30.0)
    sin30, cos30 = math.sin(math.radians(30.0)), math.cos(math.radians(30.0))
    return CaseDefinition(
        dimensionality=2,
        gravity=(0.0, 0.0, -G),
        primitives=(
            # upper debris phase, slope-aligned local frame
            _box(1, (0.1 * cos30, 0.0, 0.25 - 0.1 * sin30), (0.18, 0.0, 0.07),
                 rotations=(slope,)),
            # erodible bed phase on the flat floor
            _box(2, (0.5, 0.0, 0.0), (0.4, 0.0, 0.05)),
            _wall(10, (0.0, 0.0, 0.25), (0.5, 0.0, 0.0), layers, rotations=(slope,)),
            _wall(11, (0.45, 0.0, 0.0), (0.75, 0.0, 0.0), layers),
        ),
        materials=(
            MaterialSpec(group_id=1, rho0=1400.0, mu=0.3, n=1.0,
                         tau_y=2.0, m_papanastasiou=10.0),
            MaterialSpec(group_id=2, rho0=1800.0, mu=2.0, n=1.0,
                         tau_y=20.0, m_papanastasiou=20.0),
        ),
        numerics=NumericalSpec(dp=dp, cs=default_sound_speed(G, 0.27), alpha=0.0,
                               cfl=0.3, h_coef=1.2),
        controls=RunControls(t_end=1.5, output_interval=0.1, seed=0),
    )


def c5_case() -> CaseDefinition:
    dp = 0.025
    layers = 4
    length, width, height = 1.0, 0.3, 0.3
    size = 0.075
    blocks = []
    for col in range(3):
        for row in range(2):
            blocks.append(_box(
                30 + col * 2 + row,
                (0.55, 0.0375 + col * size, row * size),
                (size, size, size),
                role="floating_body", mass_density=600.0))
    return CaseDefinition(
        dimensionality=3,
        gravity=(0.0, 0.0, -G),
        primitives=(
            _box(1, (0.0, 0.0, 0.0), (0.2, 0.3, 0.25)),
            *_channel_walls(dp, layers, length, width, height),
            *blocks,
        ),
        materials=(MaterialSpec(group_id=1, rho0=1500.0, mu=0.3, n=1.0,
                                tau_y=2.0, m_papanastasiou=10.0),),
        numerics=NumericalSpec(dp=dp, cs=default_sound_speed(G, 0.25), alpha=0.05,
                               cfl=0.3, h_coef=1.0),
        controls=RunControls(t_end=1.0, output_interval=0.05, seed=0),
    )


BUILTIN_CASES = {
    "c1": c1_case,
    "c2": c2_case,
    "c3": c3_case,
    "c4": c4_case,
    "c5": c5_case,
}

_CONTACT = {
    "c1": ((1, 10), (1, 11)),
    "c2": ((1, 10), (1, 11)),
    "c3": ((1, 10),),
    "c4": (),
    "c5": ((1, 10), (1, 11)),
}

_NOTES = {
    "c1": "rectangular 2D collapse in a tank; debris starts in the left corner",
    "c2": "3D collapse against a fixed barrier; side gaps allow leakage",
    "c3": "inclined trench onto a flat deposition floor; slope-aligned frames",
    "c4": "two-phase 2D erosion: slope debris onto an erodible bed",
    "c5": "six floating blocks in place of the fixed barrier",
}


def builtin_case(name: str) -> CaseDefinition:
    try:
        return BUILTIN_CASES[name.lower()]()
    except KeyError:
        raise KeyError(f"unknown builtin case {name!r}; have {sorted(BUILTIN_CASES)}") from None


def builtin_truth(name: str) -> GroundTruthSpec:
    key = name.lower()
    case = builtin_case(key)
    return GroundTruthSpec.from_case(
        case, tol_m=0.01, contact=_CONTACT[key], notes=_NOTES[key])
