from .kernel import KernelSpec, kernel_eval
from .rheology import (
    RheologyParams,
    shear_rate_tensor,
    shear_rate_magnitude,
    hbp_apparent_viscosity,
)
from .neighbors import neighbor_pairs, brute_force_pairs
from .core import (
    BlowUpError,
    SolverState,
    init_state,
    compute_accelerations,
    equation_of_state,
    compute_dt,
    step,
    momentum_budget,
)

__all__ = [
    "KernelSpec",
    "kernel_eval",
    "RheologyParams",
    "shear_rate_tensor",
    "shear_rate_magnitude",
    "hbp_apparent_viscosity",
    "neighbor_pairs",
    "brute_force_pairs",
    "BlowUpError",
    "SolverState",
    "init_state",
    "compute_accelerations",
    "equation_of_state",
    "compute_dt",
    "step",
    "momentum_budget",
]
