"""Desk-scale weakly-compressible SPH solver.

Scheme summary:
  continuity     drho_i/dt = sum_j m_j (v_i - v_j) . grad_i W_ij
  momentum       dv_i/dt = -sum_j m_j (p_i/rho_i^2 + p_j/rho_j^2 + Pi_ij) grad_i W_ij
                           + laminar viscous operator (Morris form, pair viscosity)
                           + g
  pressure       Tait EOS, gamma = 7
  integration    symplectic (kick-then-drift) with a single force evaluation

Boundary particles follow dynamic boundary conditions: they take part in the
continuity equation and exert pressure/viscous forces but never move.
Floating bodies integrate the net force and torque collected by their
particles as rigid motion.

All pairwise sums run in a canonical (i, j) order so repeated runs are
bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from ..casedef import CaseDefinition, MaterialSpec, NumericalSpec, smoothing_length
from ..particles import KIND_BOUNDARY, KIND_FLOATING, KIND_FLUID, ParticleFrame, generate_particles
from .kernel import wendland_sigma
from .neighbors import neighbor_pairs
from .rheology import hbp_apparent_viscosity_arrays, shear_rate_magnitude

__all__ = [
    "BlowUpError",
    "RigidBody",
    "SolverState",
    "init_state",
    "equation_of_state",
    "compute_accelerations",
    "compute_dt",
    "step",
    "momentum_budget",
    "default_sound_speed",
]

EOS_GAMMA = 7.0
PAIR_EPS = 0.01          # Morris denominator regularization, times h^2
VISCOUS_DT_FACTOR = 0.125
BLOWUP_RHO_BAND = (0.5, 2.0)
BLOWUP_VEL_FACTOR = 10.0


class BlowUpError(Exception):
    """Numerical instability: velocity or density left its admissible band."""


def default_sound_speed(gravity_magnitude: float, fluid_height: float) -> float:
    """cs = 10 * sqrt(2 g H): keeps density variation near the 1% regime."""
    return 10.0 * math.sqrt(2.0 * gravity_magnitude * fluid_height)


@dataclass
class RigidBody:
    group: int
    indices: np.ndarray
    mass: float
    com: np.ndarray
    ref_offsets: np.ndarray      # body-frame offsets from the c.o.m. at t0
    rot: np.ndarray              # current orientation matrix
    lin_vel: np.ndarray
    ang_vel: np.ndarray
    inertia_body: np.ndarray     # about the c.o.m., body frame


@dataclass
class SolverState:
    case: CaseDefinition
    frame: ParticleFrame
    h: float
    dim: int
    gravity: np.ndarray
    rho0: np.ndarray             # per-particle reference density
    is_fluid: np.ndarray
    is_static: np.ndarray        # fixed boundary mask
    mat_mu: np.ndarray
    mat_n: np.ndarray
    mat_tau_y: np.ndarray
    mat_m: np.ndarray
    bodies: list[RigidBody]
    vmax_limit: float
    eta: np.ndarray = field(default=None)  # apparent viscosity cache
    n_steps: int = 0
    # neighbor cache (Verlet list with skin)
    _skin: float = 0.0
    _pair_i: np.ndarray = field(default=None)
    _pair_j: np.ndarray = field(default=None)
    _built_pos: np.ndarray = field(default=None)
    # pair geometry of the last force evaluation (for the staggered density update)
    _force_cache: tuple | None = None
    # (i, j, F_ij) from the last collect_pair_forces evaluation
    pair_forces: tuple | None = None

    @property
    def time(self) -> float:
        return self.frame.time

    @property
    def support_radius(self) -> float:
        return 2.0 * self.h


def _build_bodies(case: CaseDefinition, frame: ParticleFrame) -> list[RigidBody]:
    bodies = []
    for prim in case.primitives:
        if prim.role != "floating_body":
            continue
        idx = np.nonzero((frame.group == prim.group_id))[0]
        if idx.size == 0:
            continue  # reduced frames may omit this body
        m = frame.mass[idx]
        total = float(m.sum())
        com = (frame.pos[idx] * m[:, None]).sum(axis=0) / total
        offsets = frame.pos[idx] - com
        r2 = np.einsum("ij,ij->i", offsets, offsets)
        inertia = (m[:, None, None] * (
            r2[:, None, None] * np.eye(3)[None, :, :]
            - offsets[:, :, None] * offsets[:, None, :])).sum(axis=0)
        bodies.append(RigidBody(
            group=prim.group_id, indices=idx, mass=total, com=com,
            ref_offsets=offsets, rot=np.eye(3),
            lin_vel=np.zeros(3), ang_vel=np.zeros(3),
            inertia_body=inertia))
    return bodies


def init_state(case: CaseDefinition, frame: ParticleFrame | None = None) -> SolverState:
    """Build a solver state; generates the initial frame when none is given."""
    if frame is None:
        frame = generate_particles(case)
    frame = frame.copy()
    dim = case.dimensionality
    h = smoothing_length(case.numerics, dim)
    n = frame.n

    rho_ref = case.materials[0].rho0 if case.materials else 1000.0
    rho0 = np.full(n, rho_ref)
    mat_mu = np.zeros(n)
    mat_n = np.ones(n)
    mat_tau_y = np.zeros(n)
    mat_m = np.zeros(n)
    for mat in case.materials:
        sel = frame.group == mat.group_id
        rho0[sel] = mat.rho0
        mat_mu[sel] = mat.mu
        mat_n[sel] = mat.n
        mat_tau_y[sel] = mat.tau_y
        mat_m[sel] = mat.m_papanastasiou

    is_fluid = frame.kind == KIND_FLUID
    is_static = frame.kind == KIND_BOUNDARY

    g = np.asarray(case.gravity, dtype=np.float64)
    gmag = float(np.linalg.norm(g))
    height = float(frame.pos[:, 2].max() - frame.pos[:, 2].min()) if n else h
    vmax_limit = BLOWUP_VEL_FACTOR * math.sqrt(2.0 * gmag * max(height, h)) if gmag > 0 else np.inf

    state = SolverState(
        case=case, frame=frame, h=h, dim=dim, gravity=g, rho0=rho0,
        is_fluid=is_fluid, is_static=is_static,
        mat_mu=mat_mu, mat_n=mat_n, mat_tau_y=mat_tau_y, mat_m=mat_m,
        bodies=_build_bodies(case, frame), vmax_limit=vmax_limit)
    state._skin = 0.5 * h
    state.eta = np.where(
        is_fluid,
        hbp_apparent_viscosity_arrays(mat_mu, mat_n, mat_tau_y, mat_m, np.zeros(n)),
        0.0)
    return state


def _ensure_pairs(state: SolverState) -> None:
    pos = state.frame.pos
    if state._pair_i is not None:
        drift = pos - state._built_pos
        if float(np.einsum("ij,ij->i", drift, drift).max(initial=0.0)) < (0.5 * state._skin) ** 2:
            return
    pi, pj = neighbor_pairs(pos, state.support_radius + state._skin, state.dim)
    state._pair_i, state._pair_j = pi, pj
    state._built_pos = pos.copy()


def equation_of_state(rho, material: MaterialSpec, numerics: NumericalSpec):
    """Tait pressure p = (cs^2 rho0 / gamma) ((rho/rho0)^gamma - 1)."""
    rho0 = material.rho0
    b = numerics.cs**2 * rho0 / EOS_GAMMA
    ratio = np.asarray(rho, dtype=np.float64) / rho0
    p = b * (ratio**EOS_GAMMA - 1.0)
    if np.ndim(rho) == 0:
        return float(p)
    return p


def _pressure(state: SolverState, rho: np.ndarray) -> np.ndarray:
    cs2 = state.case.numerics.cs ** 2
    b = cs2 * state.rho0 / EOS_GAMMA
    return b * ((rho / state.rho0) ** EOS_GAMMA - 1.0)


def _accumulate_vec(out: np.ndarray, idx: np.ndarray, contrib: np.ndarray, n: int) -> None:
    for c in range(out.shape[1]):
        out[:, c] += np.bincount(idx, weights=contrib[:, c], minlength=n)


def compute_accelerations(state: SolverState,
                          collect_pair_forces: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Per-particle acceleration and density rate for the current state.

    Also refreshes the per-particle apparent-viscosity cache used by the
    time-step criterion.  Pairwise terms are exactly antisymmetric, so
    internal forces cancel to round-off in the global momentum budget.

    With collect_pair_forces, state.pair_forces is set to (i, j, F_ij) with
    F_ij the interaction force on particle i from particle j (gravity is a
    body force and is excluded); F_ji = -F_ij holds exactly.
    """
    frame = state.frame
    n = frame.n
    h = state.h
    dim = state.dim
    _ensure_pairs(state)
    pi, pj = state._pair_i, state._pair_j

    pos, vel, rho, mass = frame.pos, frame.vel, frame.rho, frame.mass

    rij = pos[pi] - pos[pj]
    r2 = np.einsum("ij,ij->i", rij, rij)
    cut = r2 < (2.0 * h) ** 2
    pi, pj, rij, r2 = pi[cut], pj[cut], rij[cut], r2[cut]
    r = np.sqrt(r2)

    # Wendland C2 radial derivative; grad_i W_ij = (dW/dr) * rij / r
    sigma = wendland_sigma(h, dim)
    q = r / h
    one_minus = 1.0 - 0.5 * q
    dw = -5.0 * sigma / h * q * one_minus**3
    inv_r = 1.0 / np.maximum(r, 1e-12 * h)
    gvec = rij * (dw * inv_r)[:, None]

    m_i, m_j = mass[pi], mass[pj]
    rho_i, rho_j = rho[pi], rho[pj]
    vij = vel[pi] - vel[pj]

    # velocity gradient -> shear rate -> apparent viscosity (fluid particles)
    grad_v = np.zeros((n, 3, 3))
    outer = -vij[:, :, None] * gvec[:, None, :]   # (v_j - v_i) x grad_i W_ij
    wi = (m_j / rho_j)[:, None, None] * outer
    wj = (m_i / rho_i)[:, None, None] * outer
    flat = grad_v.reshape(n, 9)
    for c in range(9):
        a, b = divmod(c, 3)
        flat[:, c] += np.bincount(pi, weights=wi[:, a, b], minlength=n)
        flat[:, c] += np.bincount(pj, weights=wj[:, a, b], minlength=n)
    gd = shear_rate_magnitude(grad_v + np.swapaxes(grad_v, 1, 2))
    eta = np.where(
        state.is_fluid,
        hbp_apparent_viscosity_arrays(state.mat_mu, state.mat_n, state.mat_tau_y, state.mat_m, gd),
        0.0)
    state.eta = eta

    # continuity
    state._force_cache = (pi, pj, gvec, m_i, m_j)
    drho = _continuity_rate(state)

    # pressure (+ artificial viscosity when enabled)
    p = _pressure(state, rho)
    frame.p[:] = p
    x_sym = p[pi] / rho_i**2 + p[pj] / rho_j**2
    alpha = state.case.numerics.alpha
    if alpha > 0.0:
        vr = np.einsum("ij,ij->i", vij, rij)
        approaching = vr < 0.0
        phi = h * vr / (r2 + PAIR_EPS * h * h)
        piv = np.where(approaching,
                       -alpha * state.case.numerics.cs * phi / (0.5 * (rho_i + rho_j)),
                       0.0)
        x_sym = x_sym + piv

    accel = np.zeros((n, 3))
    pij_force = -x_sym[:, None] * gvec
    _accumulate_vec(accel, pi, m_j[:, None] * pij_force, n)
    _accumulate_vec(accel, pj, -m_i[:, None] * pij_force, n)

    # laminar viscosity, Morris operator with a per-pair viscosity:
    # harmonic mean between fluid phases; the fluid value against walls/bodies
    eta_i, eta_j = eta[pi], eta[pj]
    both = (eta_i > 0.0) & (eta_j > 0.0)
    eta_pair = np.where(both, 2.0 * eta_i * eta_j / np.where(both, eta_i + eta_j, 1.0),
                        np.maximum(eta_i, eta_j))
    visc_on = eta_pair > 0.0
    visc_force = None
    if np.any(visc_on):
        f_ij = np.einsum("ij,ij->i", rij, gvec)
        coef = 2.0 * eta_pair * f_ij / (rho_i * rho_j * (r2 + PAIR_EPS * h * h))
        visc_force = coef[:, None] * vij
        _accumulate_vec(accel, pi, m_j[:, None] * visc_force, n)
        _accumulate_vec(accel, pj, -m_i[:, None] * visc_force, n)

    if collect_pair_forces:
        f_pair = (m_i * m_j)[:, None] * pij_force
        if visc_force is not None:
            f_pair = f_pair + (m_i * m_j)[:, None] * visc_force
        state.pair_forces = (pi, pj, f_pair)

    # gravity acts on everything that moves
    accel[~state.is_static] += state.gravity

    return accel, drho


def compute_dt(state: SolverState, numerics: NumericalSpec | None = None) -> float:
    """CFL-limited step: acoustic, body-force, and viscous-diffusion bounds."""
    num = numerics or state.case.numerics
    h = state.h
    vmax = float(np.sqrt(np.einsum("ij,ij->i", state.frame.vel, state.frame.vel).max(initial=0.0)))
    bounds = [h / (num.cs + vmax)]
    gmag = float(np.linalg.norm(state.gravity))
    if gmag > 0.0:
        bounds.append(math.sqrt(h / gmag))
    eta_max = float(state.eta.max(initial=0.0))
    if eta_max > 0.0:
        rho_min = float(state.frame.rho.min())
        bounds.append(VISCOUS_DT_FACTOR * h * h * rho_min / eta_max)
    return num.cfl * min(bounds)


def _continuity_rate(state: SolverState) -> np.ndarray:
    """Density rate from the cached pair geometry and the current velocities."""
    pi, pj, gvec, m_i, m_j = state._force_cache
    vel = state.frame.vel
    n = state.frame.n
    s = np.einsum("ij,ij->i", vel[pi] - vel[pj], gvec)
    drho = np.bincount(pi, weights=m_j * s, minlength=n)
    drho += np.bincount(pj, weights=m_i * s, minlength=n)
    return drho


def step(state: SolverState, dt: float, accel: np.ndarray | None = None) -> SolverState:
    """One solver step: kick velocities, advance density, drift positions.

    The density update uses the velocity divergence of the post-kick field
    (staggered coupling); advancing it with the pre-kick field would
    integrate the acoustic density-velocity oscillation with explicit Euler,
    which grows without bound.

    `accel` may carry accelerations already computed for this exact state
    (e.g. by a caller auditing the momentum budget); otherwise they are
    evaluated here.
    """
    if accel is None:
        accel, _ = compute_accelerations(state)
    frame = state.frame
    fluid = state.is_fluid

    # kick
    frame.vel[fluid] += accel[fluid] * dt
    for body in state.bodies:
        idx = body.indices
        mp = frame.mass[idx][:, None]
        force = (mp * accel[idx]).sum(axis=0)
        arms = frame.pos[idx] - body.com
        torque = np.cross(arms, mp * accel[idx]).sum(axis=0)
        body.lin_vel = body.lin_vel + force / body.mass * dt
        i_world = body.rot @ body.inertia_body @ body.rot.T
        try:
            ang_acc = np.linalg.solve(i_world, torque)
        except np.linalg.LinAlgError:
            ang_acc = np.linalg.pinv(i_world) @ torque
        body.ang_vel = body.ang_vel + ang_acc * dt
        world_off = frame.pos[idx] - body.com
        frame.vel[idx] = body.lin_vel + np.cross(body.ang_vel, world_off)

    # density advance with the updated field
    drho = _continuity_rate(state)
    frame.rho += drho * dt
    # dynamic boundary condition: walls and bodies never rarefy below reference
    solid = ~fluid
    frame.rho[solid] = np.maximum(frame.rho[solid], state.rho0[solid])

    # drift
    frame.pos[fluid] += frame.vel[fluid] * dt
    for body in state.bodies:
        idx = body.indices
        body.com = body.com + body.lin_vel * dt
        if float(np.linalg.norm(body.ang_vel)) > 0.0:
            body.rot = Rotation.from_rotvec(body.ang_vel * dt).as_matrix() @ body.rot
        world_off = body.ref_offsets @ body.rot.T
        frame.pos[idx] = body.com + world_off
        frame.vel[idx] = body.lin_vel + np.cross(body.ang_vel, world_off)

    frame.time += dt
    state.n_steps += 1

    moving = ~state.is_static
    if np.any(moving):
        vmax = float(np.sqrt(np.einsum("ij,ij->i", frame.vel[moving], frame.vel[moving]).max(initial=0.0)))
        if vmax > state.vmax_limit:
            raise BlowUpError(f"velocity {vmax:.3g} m/s exceeded limit {state.vmax_limit:.3g} m/s")
    ratio = frame.rho / state.rho0
    if float(ratio.min()) < BLOWUP_RHO_BAND[0] or float(ratio.max()) > BLOWUP_RHO_BAND[1]:
        raise BlowUpError("density left the [0.5, 2] x rho0 band")
    return state


def momentum_budget(state: SolverState, accel: np.ndarray) -> dict:
    """Bookkeeping for conservation tests.

    residual = sum_all m*a - (weight of fluid + floating particles); exact
    pairwise antisymmetry makes it vanish to round-off.
    """
    frame = state.frame
    m = frame.mass
    total = (m[:, None] * accel).sum(axis=0)
    weight = float(m[~state.is_static].sum()) * state.gravity
    fluid_weight = float(m[state.is_fluid].sum()) * state.gravity
    return {
        "residual": total - weight,
        "fluid_weight": fluid_weight,
        "fluid_force": (m[state.is_fluid, None] * accel[state.is_fluid]).sum(axis=0),
        "boundary_reaction": (m[state.is_static, None] * accel[state.is_static]).sum(axis=0),
    }
