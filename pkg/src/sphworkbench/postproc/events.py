"""Wall-hit timing with physically meaningful contact criteria.

In SPH, mechanical interaction starts once particles come within kernel
range of a face (2h), or once the wall registers a pressure response;
geometric crossing of the drawn outline is deliberately NOT a criterion.
"""

from __future__ import annotations

import numpy as np

from ..particles import KIND_FLUID, ParticleFrame
from .walls import WallFace

__all__ = ["NotReached", "hit_time"]

CRITERIA = ("kernel_range", "pressure_rise")


class NotReached(Exception):
    """The hit criterion was never satisfied over the given frames."""


def hit_time(frames: list[ParticleFrame], wall: WallFace, criterion: str,
             h: float | None = None, threshold: float | None = None) -> float:
    """First frame time at which the fluid 'hits' the wall face.

    kernel_range: minimum fluid distance to the wetted face <= 2h.
    pressure_rise: mean wall-group pressure exceeds its frame-0 baseline by
    `threshold` (Pa).
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")

    if criterion == "kernel_range":
        if h is None:
            raise ValueError("kernel_range criterion needs the smoothing length h")
        for frame in frames:
            fluid = frame.kind == KIND_FLUID
            if not fluid.any():
                continue
            dist = wall.face.signed_distance(frame.pos[fluid])
            if float(dist.min()) <= 2.0 * h:
                return frame.time
        raise NotReached(
            f"fluid never came within 2h of the face of group {wall.group}")

    if threshold is None:
        raise ValueError("pressure_rise criterion needs a threshold in Pa")
    sel0 = frames[0].group == wall.group
    if not sel0.any():
        raise NotReached(f"group {wall.group} has no particles")
    baseline = float(frames[0].p[sel0].mean())
    for frame in frames:
        sel = frame.group == wall.group
        if float(frame.p[sel].mean()) > baseline + threshold:
            return frame.time
    raise NotReached(
        f"wall group {wall.group} pressure never rose {threshold:g} Pa above baseline")
