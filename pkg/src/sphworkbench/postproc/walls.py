"""Wall-face inference from particle layouts.

Boundary structures have finite thickness; analyses that measure distances
or contact must use the wetted face (the particle layer nearest the fluid),
not the drawn outline or the slab midplane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..particles import KIND_BOUNDARY, KIND_FLUID, ParticleFrame
from .errors import EmptySelection

__all__ = ["PlaneSpec", "WallFace", "AmbiguousFace", "infer_wall_face", "frame_dim"]


class AmbiguousFace(Exception):
    """Fluid is equally close to both faces; the wetted side is undecidable."""


@dataclass(frozen=True)
class PlaneSpec:
    point: tuple[float, float, float]
    normal: tuple[float, float, float]

    def __post_init__(self):
        n = np.linalg.norm(self.normal)
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"plane normal must be unit length, |n| = {n}")

    def signed_distance(self, pos: np.ndarray) -> np.ndarray:
        return (np.asarray(pos) - np.asarray(self.point)) @ np.asarray(self.normal)

    @staticmethod
    def normalized(point, normal) -> "PlaneSpec":
        n = np.asarray(normal, dtype=np.float64)
        n = n / np.linalg.norm(n)
        return PlaneSpec(point=tuple(np.asarray(point, dtype=np.float64)), normal=tuple(n))


@dataclass(frozen=True)
class WallFace:
    group: int
    face: PlaneSpec          # wetted face; normal points toward the fluid
    thickness: float         # slab thickness, m


def frame_dim(frame: ParticleFrame) -> int:
    return 2 if np.all(frame.pos[:, 1] == 0.0) else 3


def infer_wall_face(frame: ParticleFrame, boundary_group: int,
                    dp: float) -> WallFace:
    """Wetted face = the boundary particle layer nearest the fluid centroid.

    The slab normal is the direction of least positional spread of the
    group's particles.  Raises AmbiguousFace when the fluid centroid is
    closer than dp to equidistant from both outer layers.
    """
    sel = (frame.group == boundary_group) & (frame.kind == KIND_BOUNDARY)
    if not sel.any():
        raise EmptySelection(f"no boundary particles in group {boundary_group}")
    pts = frame.pos[sel]

    dim = frame_dim(frame)
    cols = (0, 2) if dim == 2 else (0, 1, 2)
    centered = pts[:, cols] - pts[:, cols].mean(axis=0)
    cov = centered.T @ centered
    eigvals, eigvecs = np.linalg.eigh(cov)
    n_active = eigvecs[:, 0]          # least-spread direction
    normal = np.zeros(3)
    for i, c in enumerate(cols):
        normal[c] = n_active[i]
    normal /= np.linalg.norm(normal)

    t = pts @ normal
    t_lo, t_hi = float(t.min()), float(t.max())
    thickness = t_hi - t_lo + dp

    fluid = frame.kind == KIND_FLUID
    if not fluid.any():
        raise EmptySelection("no fluid particles to orient the wetted face")
    c_fluid = float(frame.pos[fluid].mean(axis=0) @ normal)

    # equidistant from both faces == centroid at the slab midplane
    offset = c_fluid - 0.5 * (t_hi + t_lo)
    if abs(offset) < dp:
        raise AmbiguousFace(
            f"fluid centroid is equidistant from both faces of group {boundary_group}")
    outward = 1.0 if offset > 0 else -1.0
    normal = normal * outward          # point toward the fluid
    face_point = pts[int(np.argmax(pts @ normal))]
    return WallFace(
        group=boundary_group,
        face=PlaneSpec.normalized(tuple(face_point), tuple(normal)),
        thickness=thickness)
