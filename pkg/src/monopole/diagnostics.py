"""Numerical self-checks behind ``monopole verify``.

Every check returns a :class:`Check` with the measured value and the
threshold it was held to.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from monopole.integrator import EXACT, estimate_order
from monopole.model import (
    FixedPointId,
    OdeState,
    Params,
    action,
    apply_gauge_flip,
    apply_phi_flip,
    classify_stability,
    el_residual,
    rhs,
)
from monopole.reference import TABLE1_EPSILONS, TABLE1_LAMBDAS, table1_lookup
from monopole.series import SeedCoeffs, verify_against_paper
from monopole.shooting import (
    EL_WINDOW,
    CellFailure,
    ShootingConfig,
    SolveResult,
    continuation_sweep,
    newton_solve,
    overlap_check,
)

SERIES_TOL = 1e-12
ORDER_RANGE = (3.8, 4.2)
OVERLAP_TOL = 1e-8
SYMMETRY_TOL = 1e-12
RESIDUAL_TOL = 1e-4
TABLE_TOL = 1e-4

# smooth, non-constant data away from the origin
ORDER_TEST_PARAMS = Params(1.0, 1.0)
ORDER_TEST_STATE = OdeState(0.1, -0.05, -0.6, 0.3, 1.5)

SERIES_EPSILONS = (0.1, 1.0, 10.0)
SERIES_LAMBDAS = (0.0, 1.0, 30.0)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    threshold: float | tuple[float, float]
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value,
                "threshold": self.threshold, "detail": self.detail}


def check_series(n_seeds: int = 100, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    seeds = rng.uniform(-10.0, 10.0, size=(n_seeds, 2))
    worst = 0.0
    for (a1, b2), eps, lam in itertools.product(seeds, SERIES_EPSILONS, SERIES_LAMBDAS):
        worst = max(worst, verify_against_paper(SeedCoeffs(a1, b2), Params(eps, lam)))
    return Check("series", worst <= SERIES_TOL, worst, SERIES_TOL,
                 f"{n_seeds} seeds x {len(SERIES_EPSILONS) * len(SERIES_LAMBDAS)} parameter pairs")


def check_order() -> Check:
    order = estimate_order(ORDER_TEST_PARAMS, ORDER_TEST_STATE)
    if order == EXACT:
        return Check("order", False, float("nan"), ORDER_RANGE, "test trajectory integrated exactly")
    lo, hi = ORDER_RANGE
    return Check("order", lo <= order <= hi, order, ORDER_RANGE, "Richardson, n = 100, 200, 400")


def _reference_solution(config: ShootingConfig) -> SolveResult:
    return newton_solve(Params(1.0, 0.0), None, config)


def check_overlap(config: ShootingConfig = ShootingConfig(), result: SolveResult | None = None) -> Check:
    result = result or _reference_solution(config)
    r_alt = config.r_match / 2
    dev = overlap_check(result, r_alt, config)
    return Check("overlap", dev <= OVERLAP_TOL, dev, OVERLAP_TOL, f"r_match {config.r_match} -> {r_alt}")


def check_symmetry(config: ShootingConfig = ShootingConfig(), result: SolveResult | None = None) -> Check:
    result = result or _reference_solution(config)
    prof = result.profile
    # the flips act on samples, so both sides use plain Simpson on the same grid
    s0 = action(prof)
    worst = 0.0
    for flip in (apply_phi_flip, apply_gauge_flip):
        flipped = flip(prof)
        if flip(flipped) != prof:
            return Check("symmetry", False, float("inf"), SYMMETRY_TOL, f"{flip.__name__} is not an involution")
        worst = max(worst, abs(action(flipped) - s0) / (1.0 + abs(s0)))
    return Check("symmetry", worst <= SYMMETRY_TOL, worst, SYMMETRY_TOL, f"action {s0!r}")


def check_residual(config: ShootingConfig = ShootingConfig(), result: SolveResult | None = None) -> Check:
    result = result or _reference_solution(config)
    res = el_residual(result.profile, result.params, *EL_WINDOW)
    return Check("residual", res <= RESIDUAL_TOL, res, RESIDUAL_TOL, f"window {EL_WINDOW}")


def check_fixed_points(n: int = 20, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        r = rng.uniform(0.01, 1.0)
        params = Params(rng.uniform(0.05, 20.0), rng.uniform(0.0, 40.0))
        for fp in FixedPointId:
            worst = max(worst, max(abs(v) for v in rhs(fp.state(r), params)))
    eps = 1.0
    r_star = np.sqrt(eps / 4)
    below = classify_stability(FixedPointId.HALF_PLUS, np.nextafter(r_star, 0), Params(eps, 1.0))
    above = classify_stability(FixedPointId.HALF_PLUS, np.nextafter(r_star, 1), Params(eps, 1.0))
    flips = below.unstable_mode_count == 1 and above.unstable_mode_count == 2
    return Check("fixed-points", worst == 0.0 and flips, worst, 0.0,
                 "mode count flips at r^2 = eps/4" if flips else "mode count does not flip at r^2 = eps/4")


def check_table(config: ShootingConfig = ShootingConfig(), results=None) -> Check:
    ref = table1_lookup()
    if results is None:
        results = continuation_sweep(TABLE1_EPSILONS, TABLE1_LAMBDAS, config)
    worst, failed = 0.0, 0
    for res in results:
        if isinstance(res, CellFailure):
            failed += 1
            continue
        row = ref[(res.params.epsilon, res.params.lam)]
        worst = max(worst, abs(res.seed.a1 - row.a1), abs(res.seed.b2 - row.b2))
    ok = failed == 0 and worst <= TABLE_TOL
    return Check("table", ok, worst, TABLE_TOL, f"{len(results) - failed}/{len(results)} cells converged")


CHECKS = {
    "series": check_series,
    "order": check_order,
    "overlap": check_overlap,
    "symmetry": check_symmetry,
    "residual": check_residual,
    "fixed-points": check_fixed_points,
    "table": check_table,
}
