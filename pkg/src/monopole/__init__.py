"""Spherically symmetric Yang-Mills-Higgs monopoles on the unit ball.

Series at the origin, RK4 outward, Newton on the two free Taylor
coefficients ``(a1, b2)`` until ``gamma(1) = -1/2`` and ``phi(1) = 1``.
"""
__version__ = "0.1.0"

from monopole.integrator import DivergenceError, IntegratorConfig, estimate_order, integrate, step
from monopole.model import (
    FixedPointId,
    OdeState,
    Params,
    Profile,
    StabilityReport,
    action,
    apply_gauge_flip,
    apply_phi_flip,
    classify_stability,
    el_residual,
    length_scales,
    rhs,
)
from monopole.series import SeedCoeffs, TaylorSeries, compute_coeffs, eval_series, verify_against_paper
from monopole.shooting import (
    CellFailure,
    ShootingConfig,
    SolveResult,
    boundary_map,
    continuation_sweep,
    default_guess,
    jacobian_fd,
    newton_solve,
    overlap_check,
)

__all__ = [
    "CellFailure", "DivergenceError", "FixedPointId", "IntegratorConfig", "OdeState", "Params",
    "Profile", "SeedCoeffs", "ShootingConfig", "SolveResult", "StabilityReport", "TaylorSeries",
    "action", "apply_gauge_flip", "apply_phi_flip", "boundary_map", "classify_stability",
    "compute_coeffs", "continuation_sweep", "default_guess", "el_residual", "estimate_order",
    "eval_series", "integrate", "jacobian_fd", "length_scales", "newton_solve", "overlap_check",
    "rhs", "step", "verify_against_paper",
]
