"""Free-surface profile extraction at a cross-section plane."""

from __future__ import annotations

import numpy as np

from ..particles import KIND_FLUID, ParticleFrame
from .errors import EmptySelection
from .walls import PlaneSpec

__all__ = ["surface_profile"]


def surface_profile(frame: ParticleFrame, plane: PlaneSpec, band: float,
                    dp: float, group: int | None = None) -> np.ndarray:
    """Upper envelope of the fluid inside a slab around a cutting plane.

    Particles within `band` of the plane are binned at width dp along the
    horizontal in-plane axis; each bin reports its maximum elevation, so
    interior particles are excluded by construction.  Returns an (n, 2)
    array of (in-plane coordinate, height) sorted along the axis.
    """
    if band < dp:
        raise ValueError("band must be at least dp")
    normal = np.asarray(plane.normal)
    u = np.cross((0.0, 0.0, 1.0), normal)
    if np.linalg.norm(u) < 1e-9:
        raise ValueError("cutting plane must not be horizontal")
    u /= np.linalg.norm(u)

    sel = frame.kind == KIND_FLUID
    if group is not None:
        sel &= frame.group == group
    pts = frame.pos[sel]
    if pts.shape[0] == 0:
        raise EmptySelection("no fluid particles")
    dist = np.abs(plane.signed_distance(pts))
    pts = pts[dist <= band]
    if pts.shape[0] == 0:
        raise EmptySelection("no particles within the band of the plane")

    coords = pts @ u
    heights = pts[:, 2]
    bins = np.floor(coords / dp).astype(np.int64)
    order = np.argsort(bins, kind="stable")
    bins_sorted = bins[order]
    heights_sorted = heights[order]
    uniq, starts = np.unique(bins_sorted, return_index=True)
    top = np.maximum.reduceat(heights_sorted, starts)
    centers = (uniq + 0.5) * dp
    return np.column_stack([centers, top])
