"""Wendland C2 smoothing kernel with compact support 2h.

W(r) = sigma_d * (1 - q/2)^4 * (1 + 2q),  q = r/h in [0, 2]

with sigma_2 = 7 / (4 pi h^2) in 2D and sigma_3 = 21 / (16 pi h^3) in 3D.
The radial derivative is dW/dr = -(5/h) * sigma_d * q * (1 - q/2)^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["KernelSpec", "kernel_eval", "wendland_sigma"]


def wendland_sigma(h: float, dimensionality: int) -> float:
    if dimensionality == 2:
        return 7.0 / (4.0 * math.pi * h * h)
    if dimensionality == 3:
        return 21.0 / (16.0 * math.pi * h * h * h)
    raise ValueError(f"dimensionality must be 2 or 3, got {dimensionality}")


@dataclass(frozen=True)
class KernelSpec:
    """Wendland C2 kernel bound to a smoothing length and dimensionality."""

    h: float
    dimensionality: int

    @property
    def support_radius(self) -> float:
        return 2.0 * self.h

    @property
    def sigma(self) -> float:
        return wendland_sigma(self.h, self.dimensionality)


def kernel_eval(r, h: float, dimensionality: int):
    """Evaluate (W, dW/dr) at distance r >= 0; both vanish for r >= 2h.

    Accepts scalars or arrays; vectorized over r.
    """
    sigma = wendland_sigma(h, dimensionality)
    q = np.asarray(r, dtype=np.float64) / h
    inside = q < 2.0
    qc = np.where(inside, q, 2.0)
    one_minus = 1.0 - 0.5 * qc
    w = sigma * one_minus**4 * (1.0 + 2.0 * qc)
    dw = -5.0 * sigma / h * qc * one_minus**3
    w = np.where(inside, w, 0.0)
    dw = np.where(inside, dw, 0.0)
    if np.ndim(r) == 0:
        return float(w), float(dw)
    return w, dw
