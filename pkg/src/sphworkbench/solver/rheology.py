"""Herschel-Bulkley rheology with Papanastasiou regularization.

The apparent viscosity as a function of the shear-rate magnitude gd is

    eta(gd) = mu * gd^(n-1) + (tau_y / gd) * (1 - exp(-m * gd))

which recovers a Newtonian fluid for (tau_y = 0, n = 1) and approaches a
Bingham plastic as m grows at n = 1.  At gd -> 0 the yield term tends to
tau_y * m, so the fluid behaves as a very viscous (not rigid) medium below
yield, which is what makes an explicit solver viable.
"""

from __future__ import annotations

import numpy as np

from ..casedef import MaterialSpec

__all__ = [
    "RheologyParams",
    "shear_rate_tensor",
    "shear_rate_magnitude",
    "hbp_apparent_viscosity",
    "GD_MIN",
    "ETA_CAP_FACTOR",
]

# Shear-rate floor inside the power-law term (for n < 1 the term diverges at
# rest) and the stability cap on the apparent viscosity.
GD_MIN = 1e-6
ETA_CAP_FACTOR = 1e4

RheologyParams = MaterialSpec  # the rheology view of a material: mu, n, tau_y, m


def shear_rate_tensor(velocity_gradient: np.ndarray) -> np.ndarray:
    """Shear-rate tensor gamma = grad(v) + grad(v)^T (exact, symmetric).

    Accepts a single d x d tensor or a batch (..., d, d).
    """
    g = np.asarray(velocity_gradient, dtype=np.float64)
    return g + np.swapaxes(g, -1, -2)


def shear_rate_magnitude(gamma_dot: np.ndarray):
    """Magnitude of a symmetric shear-rate tensor: sqrt(1/2 * sum_ij g_ij^2).

    Note on the convention: the second-invariant expression
    sqrt(1/2 * ((tr g)^2 - tr(g^2))) produces a negative radicand for
    incompressible simple shear (tr g = 0, tr(g^2) = 2k^2 > 0), so it cannot
    serve as a magnitude there.  This implementation deliberately uses the
    Frobenius form sqrt(1/2 * g:g) instead, which gives k for simple shear
    with velocity gradient [[0, k], [0, 0]] and k for uniaxial extension
    diag(k, -k).
    """
    g = np.asarray(gamma_dot, dtype=np.float64)
    mag = np.sqrt(0.5 * np.sum(g * g, axis=(-1, -2)))
    if g.ndim == 2:
        return float(mag)
    return mag


def hbp_apparent_viscosity(params: RheologyParams, gd):
    """Apparent viscosity (Pa*s) at shear-rate magnitude gd >= 0.

    The gd = 0 limit is handled analytically: the yield term tends to
    tau_y * m and the power-law term to mu for n = 1, to 0 for n > 1, and is
    clamped at GD_MIN for n < 1.  The result is capped at ETA_CAP_FACTOR * mu
    when mu > 0 (the cap guards the shear-thinning blow-up; with mu = 0 there
    is no power-law term to guard and the cap is disabled).

    Vectorized over gd.
    """
    gd_arr = np.asarray(gd, dtype=np.float64)
    scalar = gd_arr.ndim == 0
    gd_arr = np.atleast_1d(gd_arr)
    if np.any(gd_arr < 0):
        raise ValueError("shear-rate magnitude must be >= 0")
    eta = hbp_apparent_viscosity_arrays(
        params.mu, params.n, params.tau_y, params.m_papanastasiou, gd_arr)
    if scalar:
        return float(eta[0])
    return eta


def hbp_apparent_viscosity_arrays(mu, n, tau_y, m, gd: np.ndarray) -> np.ndarray:
    """Same formula with per-element parameters (solver-facing)."""
    mu = np.broadcast_to(np.asarray(mu, dtype=np.float64), gd.shape)
    n = np.broadcast_to(np.asarray(n, dtype=np.float64), gd.shape)
    tau_y = np.broadcast_to(np.asarray(tau_y, dtype=np.float64), gd.shape)
    m = np.broadcast_to(np.asarray(m, dtype=np.float64), gd.shape)

    # the floor only guards the n < 1 divergence; for n >= 1 the term is
    # already continuous at rest (gd^(n-1) -> 0 for n > 1)
    gd_pl = np.where(n < 1.0, np.maximum(gd, GD_MIN), gd)
    power_term = np.where(n == 1.0, mu, mu * gd_pl ** (n - 1.0))

    # (1 - exp(-m*gd)) / gd -> m as gd -> 0; expm1 keeps small-gd accuracy
    safe_gd = np.where(gd > 0.0, gd, 1.0)
    yield_factor = np.where(gd > 0.0, -np.expm1(-m * gd) / safe_gd, m)
    eta = power_term + tau_y * yield_factor

    cap = np.where(mu > 0.0, ETA_CAP_FACTOR * mu, np.inf)
    return np.minimum(eta, cap)
