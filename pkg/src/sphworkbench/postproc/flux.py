"""Mass flux through a plane from particle crossings.

Every particle carries a constant mass, so the flux through a section is
just the crossing bookkeeping: each sign change of a particle's distance to
the plane between consecutive frames moves one particle mass across.
"""

from __future__ import annotations

import numpy as np

from ..particles import KIND_FLUID, ParticleFrame
from .series import TimeSeries
from .walls import PlaneSpec

__all__ = ["mass_flux"]


def mass_flux(frames: list[ParticleFrame], plane: PlaneSpec) -> tuple[TimeSeries, float]:
    """Per-interval mass flux (kg/s, positive along the plane normal) and
    the cumulative mass transported (kg).

    Crossings are detected as sign changes between consecutive frames (no
    sub-frame interpolation), so cumulative mass equals particle mass times
    net crossings exactly.
    """
    if len(frames) < 2:
        raise ValueError("mass_flux needs at least two frames")
    times = []
    fluxes = []
    cumulative = 0.0
    prev = None
    for frame in frames:
        sel = frame.kind == KIND_FLUID
        pids = frame.ids[sel]
        side = plane.signed_distance(frame.pos[sel]) > 0
        mass = frame.mass[sel]
        if prev is not None:
            p_pids, p_side, p_time = prev
            if not np.array_equal(pids, p_pids):
                raise ValueError("fluid id ordering changed between frames")
            dt = frame.time - p_time
            crossed = side != p_side
            signs = np.where(side[crossed], 1.0, -1.0)
            transported = float((mass[crossed] * signs).sum())
            fluxes.append(transported / dt)
            times.append(frame.time)
            cumulative += transported
        prev = (pids, side, frame.time)
    series = TimeSeries(times=np.array(times), values=np.array(fluxes),
                        label="mass flux through plane", units="kg/s")
    return series, cumulative
