"""Shooting from the origin: boundary map, Newton iteration and continuation.

A seed ``(a1, b2)`` fixes the Taylor series at r = 0; the series is
evaluated at ``r_match`` and RK4 carries the state to r = 1.  Newton then
adjusts the seed until ``(gamma(1), phi(1)) = (-1/2, 1)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from monopole.integrator import (
    DivergenceError,
    IntegratorConfig,
    integrate,
    integrate_endpoint,
)
from monopole.model import ModelError, Params, Profile, action, el_residual
from monopole.reference import table1
from monopole.series import (
    SeedCoeffs,
    SeriesBlowupError,
    TaylorSeries,
    compute_coeffs,
    eval_series,
    eval_series_arrays,
)

log = logging.getLogger(__name__)

GAMMA_TARGET = -0.5
PHI_TARGET = 1.0
# window for the stored Euler-Lagrange diagnostic
EL_WINDOW = (0.02, 0.98)
FALLBACK_GUESS = SeedCoeffs(1.6, -1.0)
# beyond this distance in (log eps, log(1 + lam)) no anchor is trusted
ANCHOR_RADIUS = 3.0
COND_LIMIT = 1e12


@dataclass(frozen=True)
class ShootingConfig:
    r_match: float = 0.01
    series_order: int = 10
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    newton_tol: float = 1e-10
    max_iters: int = 50
    fd_step: float = 1e-6
    damping: float = 0.5
    max_halvings: int = 20
    # radius where (gamma, phi) = (-1/2, 1) is imposed
    target_radius: float = 1.0

    def __post_init__(self):
        if not 0 < self.r_match <= 0.1:
            raise ModelError(f"r_match must lie in (0, 0.1], got {self.r_match}")
        if not self.r_match < self.target_radius <= 1.0:
            raise ModelError(f"target_radius must lie in (r_match, 1], got {self.target_radius}")
        if self.newton_tol <= 0 or self.fd_step <= 0:
            raise ModelError("newton_tol and fd_step must be positive")
        if not 0 < self.damping < 1:
            raise ModelError("damping factor must lie in (0, 1)")
        if self.max_iters < 1 or self.max_halvings < 0:
            raise ModelError("max_iters must be >= 1 and max_halvings >= 0")
        if self.series_order % 2 or not 2 <= self.series_order <= 64:
            raise ModelError(f"series_order must be even in [2, 64], got {self.series_order}")

    @property
    def step_size(self) -> float:
        return (1.0 - self.r_match) / self.integrator.n_steps

    @property
    def target_steps(self) -> int:
        """RK4 steps from ``r_match`` to ``target_radius`` at the configured step size."""
        if self.target_radius == 1.0:
            return self.integrator.n_steps
        return int(round((self.target_radius - self.r_match) / self.step_size))

    @classmethod
    def published_lattice(cls, **overrides) -> ShootingConfig:
        """Lattice r_i = i * 1e-4, i = 0..9999: series up to r = 0.01 and the
        boundary values read at the last lattice point r = 0.9999."""
        kw = dict(r_match=0.01, integrator=IntegratorConfig(n_steps=9900), target_radius=0.9999)
        kw.update(overrides)
        return cls(**kw)


class ShootingError(ArithmeticError):
    code = "shooting-error"

    def context(self) -> dict:
        return {}


class MapFailure(ShootingError):
    """The boundary map could not be evaluated at ``seed``."""

    code = "map-failure"

    def __init__(self, seed: SeedCoeffs, radius: float, reason: str):
        super().__init__(f"boundary map failed at seed ({seed.a1!r}, {seed.b2!r}) near r={radius:.6g}: {reason}")
        self.seed = seed
        self.radius = radius
        self.reason = reason

    def context(self) -> dict:
        return {"a1": self.seed.a1, "b2": self.seed.b2, "radius": self.radius}


class SingularJacobianError(ShootingError):
    code = "singular-jacobian"

    def __init__(self, seed: SeedCoeffs, jacobian: np.ndarray, cond: float):
        super().__init__(f"Jacobian at ({seed.a1!r}, {seed.b2!r}) has condition number {cond:.3e}")
        self.seed = seed
        self.jacobian = jacobian
        self.cond = cond

    def context(self) -> dict:
        return {"a1": self.seed.a1, "b2": self.seed.b2, "condition": self.cond,
                "jacobian": self.jacobian.tolist()}


class NonConvergenceError(ShootingError):
    code = "non-convergence"

    def __init__(self, params: Params, best: SeedCoeffs, residual: float, iterations: int):
        super().__init__(f"Newton did not converge for eps={params.epsilon}, lambda={params.lam} "
                         f"after {iterations} iterations (best residual {residual:.3e})")
        self.params = params
        self.best = best
        self.residual = residual
        self.iterations = iterations

    def context(self) -> dict:
        return {"epsilon": self.params.epsilon, "lambda": self.params.lam,
                "best_a1": self.best.a1, "best_b2": self.best.b2,
                "residual_inf": self.residual, "iterations": self.iterations}


class NewtonDivergenceError(NonConvergenceError):
    """Every damped step landed on seeds where the map fails."""

    code = "divergence"


@dataclass(frozen=True, eq=False)
class SolveResult:
    seed: SeedCoeffs
    params: Params
    residual: tuple[float, float]
    iterations: int
    profile: Profile
    action_value: float
    el_residual_max: float
    residual_history: tuple[float, ...] = ()

    @property
    def residual_inf(self) -> float:
        return max(abs(self.residual[0]), abs(self.residual[1]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SolveResult):
            return NotImplemented
        return (self.seed == other.seed and self.params == other.params
                and self.residual == other.residual and self.iterations == other.iterations
                and self.profile == other.profile and self.action_value == other.action_value
                and self.el_residual_max == other.el_residual_max
                and self.residual_history == other.residual_history)

    __hash__ = None


@dataclass(frozen=True)
class CellFailure:
    """A sweep cell that did not converge; ``best`` is the last usable seed."""

    params: Params
    code: str
    detail: str
    best: SeedCoeffs | None = None


# ---------------------------------------------------------------------------


def _handoff_state(seed: SeedCoeffs, params: Params, config: ShootingConfig):
    try:
        series = compute_coeffs(seed, params, config.series_order)
    except SeriesBlowupError as exc:
        raise MapFailure(seed, 0.0, str(exc)) from exc
    start = eval_series(series, config.r_match)
    return series, start


def boundary_map(seed: SeedCoeffs, params: Params, config: ShootingConfig = ShootingConfig()) -> tuple[float, float]:
    """``(gamma, phi)`` at ``config.target_radius`` (r = 1 by default) reached from the seed."""
    _, start = _handoff_state(seed, params, config)
    try:
        end = integrate_endpoint(start, config.target_radius, config.target_steps, params)
    except DivergenceError as exc:
        raise MapFailure(seed, exc.radius, "trajectory blew up") from exc
    return end.gamma, end.phi


def _residual(seed, params, config) -> np.ndarray:
    g1, p1 = boundary_map(seed, params, config)
    return np.array([g1 - GAMMA_TARGET, p1 - PHI_TARGET])


def jacobian_fd(seed: SeedCoeffs, params: Params, config: ShootingConfig = ShootingConfig()) -> np.ndarray:
    """Central-difference Jacobian of the boundary map.

    Rows are ``(gamma(1), phi(1))``, columns ``(d/da1, d/db2)``.  The step
    for each coordinate is ``fd_step * max(1, |coefficient|)``.
    """
    x = seed.as_array()
    jac = np.empty((2, 2))
    for j in range(2):
        h = config.fd_step * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        fp = np.array(boundary_map(SeedCoeffs(*xp), params, config))
        fm = np.array(boundary_map(SeedCoeffs(*xm), params, config))
        jac[:, j] = (fp - fm) / (xp[j] - xm[j])
    cond = np.linalg.cond(jac)
    if not cond <= COND_LIMIT:
        raise SingularJacobianError(seed, jac, float(cond))
    return jac


def build_profile(seed: SeedCoeffs, params: Params, config: ShootingConfig,
                  series: TaylorSeries | None = None) -> Profile:
    """Series samples on ``[0, r_match)`` joined to the RK4 trajectory on ``[r_match, 1]``."""
    if series is None:
        series, start = _handoff_state(seed, params, config)
    else:
        start = eval_series(series, config.r_match)
    try:
        outer = integrate(start, 1.0, config.integrator, params)
    except DivergenceError as exc:
        raise MapFailure(seed, exc.radius, "trajectory blew up") from exc
    spacing = outer.radii[1] - outer.radii[0]
    n_inner = max(2, int(round(config.r_match / spacing)))
    inner_r = np.linspace(0.0, config.r_match, n_inner + 1)[:-1]
    inner = np.column_stack(eval_series_arrays(series, inner_r))
    return Profile(params, np.concatenate([inner_r, outer.radii]),
                   np.vstack([inner, outer.states]), r_match=config.r_match)


def _finish(seed, params, config, residual, iterations, history) -> SolveResult:
    series = compute_coeffs(seed, params, config.series_order)
    profile = build_profile(seed, params, config, series)
    return SolveResult(
        seed=seed,
        params=params,
        residual=(float(residual[0]), float(residual[1])),
        iterations=iterations,
        profile=profile,
        action_value=action(profile, series),
        el_residual_max=el_residual(profile, params, *EL_WINDOW),
        residual_history=tuple(history),
    )


def _newton_seed(params: Params, guess: SeedCoeffs, config: ShootingConfig) -> SeedCoeffs:
    return _newton(params, guess, config)[0]


def newton_solve(params: Params, guess: SeedCoeffs | None = None,
                 config: ShootingConfig = ShootingConfig()) -> SolveResult:
    """Damped Newton iteration on ``F(a1, b2) = (gamma(1) + 1/2, phi(1) - 1)``.

    Each step is shortened by ``config.damping`` until the residual
    max-norm decreases, at most ``config.max_halvings`` times.  The result
    carries the full profile, from the series on ``[0, r_match)`` through
    the RK4 trajectory to r = 1.
    """
    x = default_guess(params) if guess is None else guess
    seed, F, iterations, history = _newton(params, x, config)
    return _finish(seed, params, config, F, iterations, history)


def _newton(params: Params, x: SeedCoeffs, config: ShootingConfig):
    F = _residual(x, params, config)
    norm = float(np.max(np.abs(F)))
    history = [norm]
    for it in range(config.max_iters + 1):
        if norm <= config.newton_tol:
            log.debug("eps=%g lam=%g converged in %d iterations", params.epsilon, params.lam, it)
            return x, F, it, history
        if it == config.max_iters:
            break
        jac = jacobian_fd(x, params, config)
        dx = np.linalg.solve(jac, -F)
        t = 1.0
        accepted = False
        failures = 0
        for _ in range(config.max_halvings + 1):
            trial = SeedCoeffs(*(x.as_array() + t * dx))
            try:
                F_trial = _residual(trial, params, config)
            except MapFailure:
                failures += 1
                t *= config.damping
                continue
            trial_norm = float(np.max(np.abs(F_trial)))
            if trial_norm < norm:
                x, F, norm = trial, F_trial, trial_norm
                accepted = True
                break
            t *= config.damping
        if not accepted:
            cls = NewtonDivergenceError if failures == config.max_halvings + 1 else NonConvergenceError
            raise cls(params, x, norm, it + 1)
        history.append(norm)
    raise NonConvergenceError(params, x, norm, config.max_iters)


# ---------------------------------------------------------------------------
# Continuation


def _metric(eps: float, lam: float) -> tuple[float, float]:
    return math.log(eps), math.log1p(lam)


def default_guess(params: Params) -> SeedCoeffs:
    """Published seed of the nearest grid cell in ``(log eps, log(1 + lam))``."""
    px, py = _metric(params.epsilon, params.lam)
    best, best_d = None, math.inf
    for row in table1():
        qx, qy = _metric(row.epsilon, row.lam)
        d = math.hypot(px - qx, py - qy)
        if d < best_d:
            best, best_d = row, d
    if best is None or best_d > ANCHOR_RADIUS:
        return FALLBACK_GUESS
    return SeedCoeffs(best.a1, best.b2)


def sweep_order(eps_list, lambda_list, reverse: bool = False) -> list[list[Params]]:
    """Rows of cells in solve order: epsilon descending, lambda ascending within a row."""
    eps_sorted = sorted(set(eps_list), reverse=not reverse)
    lam_sorted = sorted(set(lambda_list), reverse=reverse)
    return [[Params(e, lam) for lam in lam_sorted] for e in eps_sorted]


MAX_SUBSTEP_DEPTH = 8


def _between(a: Params, b: Params) -> Params:
    # geometric in epsilon, arithmetic in lambda
    return Params(math.sqrt(a.epsilon * b.epsilon), 0.5 * (a.lam + b.lam))


def _bridge_seed(src: Params, seed: SeedCoeffs, dst: Params, config: ShootingConfig,
                 depth: int = 0) -> SeedCoeffs:
    """Carry a converged seed at ``src`` to a converged seed at ``dst``.

    Tries a direct Newton solve first and bisects the parameter step when
    that fails.
    """
    try:
        return _newton_seed(dst, seed, config)
    except ShootingError:
        if depth >= MAX_SUBSTEP_DEPTH:
            raise
    mid = _between(src, dst)
    log.debug("substep eps=%g lam=%g (depth %d)", mid.epsilon, mid.lam, depth + 1)
    mid_seed = _bridge_seed(src, seed, mid, config, depth + 1)
    return _bridge_seed(mid, mid_seed, dst, config, depth + 1)


def continue_to(src: Params, seed: SeedCoeffs, dst: Params,
                config: ShootingConfig = ShootingConfig()) -> SolveResult:
    """Solve at ``dst`` starting from the converged seed at ``src``."""
    try:
        return newton_solve(dst, seed, config)
    except ShootingError:
        bridged = _bridge_seed(src, seed, dst, config)
    return newton_solve(dst, bridged, config)


def solve_row(row: list[Params], start_guess: SeedCoeffs, config: ShootingConfig,
              start_params: Params | None = None) -> list[SolveResult | CellFailure]:
    """One continuation chain: each converged seed seeds the next cell.

    ``start_params`` is where ``start_guess`` is a known solution, if any;
    it enables parameter substeps towards the first cell.
    """
    out: list[SolveResult | CellFailure] = []
    guess, anchor = start_guess, start_params
    for params in row:
        try:
            if anchor is None:
                res = newton_solve(params, guess, config)
            else:
                res = continue_to(anchor, guess, params, config)
        except ShootingError as exc:
            best = getattr(exc, "best", None)
            out.append(CellFailure(params, exc.code, str(exc), best))
            log.warning("cell eps=%g lam=%g failed: %s", params.epsilon, params.lam, exc)
            continue
        out.append(res)
        guess, anchor = res.seed, res.params
    return out


def continuation_sweep(eps_list, lambda_list, config: ShootingConfig = ShootingConfig(),
                       guess: SeedCoeffs | None = None, reverse: bool = False,
                       independent_rows: bool = False,
                       threads: int = 1) -> list[SolveResult | CellFailure]:
    """Solve every ``(eps, lam)`` cell, reusing converged seeds as guesses.

    Cells are visited with epsilon descending and lambda ascending inside
    each epsilon (``reverse=True`` flips both).  By default the first cell
    of a row is seeded from the first converged cell of the previous row
    and the very first cell uses ``guess`` or :func:`default_guess`.  With
    ``independent_rows`` every row starts from :func:`default_guess`, which
    lets rows run on ``threads`` worker threads.  Failures are recorded per
    cell and never abort the sweep.  Results come back in visiting order.
    """
    if not len(eps_list) or not len(lambda_list):
        raise ModelError("continuation_sweep needs nonempty parameter lists")
    rows = sweep_order(eps_list, lambda_list, reverse)
    if threads != 1 and not independent_rows:
        raise ModelError("parallel sweeps need independent_rows=True")

    if independent_rows:
        def run(row):
            return solve_row(row, default_guess(row[0]) if guess is None else guess, config)

        if threads == 1:
            chunks = [run(row) for row in rows]
        else:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads or None) as pool:
                chunks = list(pool.map(run, rows))
        return [res for chunk in chunks for res in chunk]

    results: list[SolveResult | CellFailure] = []
    row_start, row_anchor = guess, None
    for row in rows:
        start = row_start if row_start is not None else default_guess(row[0])
        row_results = solve_row(row, start, config, row_anchor)
        results.extend(row_results)
        if isinstance(row_results[0], SolveResult):
            row_start, row_anchor = row_results[0].seed, row_results[0].params
    return results


def overlap_check(result: SolveResult, r_alt: float, config: ShootingConfig = ShootingConfig()) -> float:
    """Max change of ``(gamma(1), phi(1))`` when the handoff moves to ``r_alt``.

    ``config`` must be the configuration that produced ``result``; the
    number of RK4 steps is scaled so the step size stays the same.
    """
    if not 0 < r_alt <= config.r_match:
        raise ModelError(f"r_alt must lie in (0, r_match={config.r_match}], got {r_alt}")
    seed, params = result.seed, result.params
    ref = np.array(boundary_map(seed, params, config))
    if r_alt == config.r_match:
        return 0.0
    h = (1.0 - config.r_match) / config.integrator.n_steps
    n_alt = int(round((1.0 - r_alt) / h))
    alt_cfg = replace(config, r_match=r_alt, integrator=replace(config.integrator, n_steps=n_alt))
    alt = np.array(boundary_map(seed, params, alt_cfg))
    return float(np.max(np.abs(alt - ref)))
