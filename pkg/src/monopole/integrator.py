"""Fixed-step classical RK4 from the handoff radius out to the boundary."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from monopole.model import ModelError, OdeState, Params, Profile, rhs_kernel

DIVERGENCE_LIMIT = 1e8


@dataclass(frozen=True)
class IntegratorConfig:
    """``n_steps`` RK4 steps across ``[r_start, r_end]``; keep every ``record_every``-th state."""

    n_steps: int = 10_000
    record_every: int = 1

    def __post_init__(self):
        if self.n_steps < 10:
            raise ModelError(f"n_steps must be at least 10, got {self.n_steps}")
        if self.record_every < 1:
            raise ModelError(f"record_every must be >= 1, got {self.record_every}")


class DivergenceError(ArithmeticError):
    """The trajectory left the finite region before reaching the end radius.

    ``radius`` is the last radius at which the state was still sane and
    ``partial`` holds the trajectory up to there (or ``None``).
    """

    def __init__(self, radius: float, partial: Profile | None = None):
        super().__init__(f"integration diverged near r={radius:.6g}")
        self.radius = radius
        self.partial = partial


@numba.njit(cache=True, nogil=True)
def _rk4_step(r, y0, y1, y2, y3, h, eps, lam):
    k10, k11, k12, k13 = rhs_kernel(r, y0, y1, y2, y3, eps, lam)
    hh = 0.5 * h
    rm = r + hh
    k20, k21, k22, k23 = rhs_kernel(rm, y0 + hh * k10, y1 + hh * k11, y2 + hh * k12, y3 + hh * k13, eps, lam)
    k30, k31, k32, k33 = rhs_kernel(rm, y0 + hh * k20, y1 + hh * k21, y2 + hh * k22, y3 + hh * k23, eps, lam)
    rn = r + h
    k40, k41, k42, k43 = rhs_kernel(rn, y0 + h * k30, y1 + h * k31, y2 + h * k32, y3 + h * k33, eps, lam)
    s = h / 6.0
    return (
        y0 + s * (k10 + 2.0 * k20 + 2.0 * k30 + k40),
        y1 + s * (k11 + 2.0 * k21 + 2.0 * k31 + k41),
        y2 + s * (k12 + 2.0 * k22 + 2.0 * k32 + k42),
        y3 + s * (k13 + 2.0 * k23 + 2.0 * k33 + k43),
    )


@numba.njit(cache=True, nogil=True)
def _sane(y0, y1, y2, y3, limit):
    return abs(y0) <= limit and abs(y1) <= limit and abs(y2) <= limit and abs(y3) <= limit


@numba.njit(cache=True, nogil=True)
def _rk4_run(r0, h, n, y, eps, lam, out, limit):
    """Fill ``out[i]`` with the state at ``r0 + i*h``; returns steps completed."""
    y0, y1, y2, y3 = y[0], y[1], y[2], y[3]
    out[0, 0], out[0, 1], out[0, 2], out[0, 3] = y0, y1, y2, y3
    for i in range(n):
        y0, y1, y2, y3 = _rk4_step(r0 + i * h, y0, y1, y2, y3, h, eps, lam)
        # NaN fails every comparison, so this also catches non-finite values
        if not _sane(y0, y1, y2, y3, limit):
            return i
        out[i + 1, 0], out[i + 1, 1], out[i + 1, 2], out[i + 1, 3] = y0, y1, y2, y3
    return n


@numba.njit(cache=True, nogil=True)
def _rk4_endpoint(r0, h, n, y, eps, lam, limit):
    y0, y1, y2, y3 = y[0], y[1], y[2], y[3]
    for i in range(n):
        y0, y1, y2, y3 = _rk4_step(r0 + i * h, y0, y1, y2, y3, h, eps, lam)
        if not _sane(y0, y1, y2, y3, limit):
            return i, y0, y1, y2, y3
    return n, y0, y1, y2, y3


def step(state: OdeState, h: float, params: Params) -> OdeState:
    """One classical RK4 step of size ``h``."""
    if not state.r > 0:
        raise ModelError(f"cannot step from r={state.r}; the origin is singular")
    if state.r + h > 1.0 + abs(h) * 1e-9:
        raise ModelError(f"step from r={state.r} with h={h} overshoots r=1")
    y = _rk4_step(state.r, *state.as_tuple(), h, params.epsilon, params.lam)
    if not all(math.isfinite(v) for v in y):
        raise DivergenceError(state.r)
    return OdeState(state.r + h, *y)


def _grid(r0: float, r_end: float, n: int) -> tuple[float, np.ndarray]:
    h = (r_end - r0) / n
    radii = r0 + np.arange(n + 1) * h
    radii[-1] = r_end
    return h, radii


def integrate(start: OdeState, r_end: float, config: IntegratorConfig, params: Params) -> Profile:
    """Uniform-step RK4 trajectory from ``start.r`` to ``r_end``.

    The returned profile keeps every ``config.record_every``-th state and
    always both endpoints.  A blow-up raises :class:`DivergenceError` with
    the partial trajectory attached.
    """
    if not 0 < start.r < r_end <= 1.0:
        raise ModelError(f"need 0 < start.r < r_end <= 1, got {start.r}, {r_end}")
    n = config.n_steps
    h, radii = _grid(start.r, r_end, n)
    out = np.empty((n + 1, 4))
    done = _rk4_run(start.r, h, n, start.as_array(), params.epsilon, params.lam, out, DIVERGENCE_LIMIT)
    if done < n:
        partial = None
        if done >= 1:
            partial = Profile(params, radii[: done + 1], out[: done + 1], r_match=start.r)
        raise DivergenceError(float(radii[done]), partial)
    keep = np.arange(0, n + 1, config.record_every)
    if keep[-1] != n:
        keep = np.append(keep, n)
    return Profile(params, radii[keep], out[keep], r_match=start.r)


def integrate_endpoint(start: OdeState, r_end: float, n_steps: int, params: Params) -> OdeState:
    """Final state only; same arithmetic as :func:`integrate` without storing the path."""
    if not 0 < start.r < r_end <= 1.0:
        raise ModelError(f"need 0 < start.r < r_end <= 1, got {start.r}, {r_end}")
    h = (r_end - start.r) / n_steps
    done, *y = _rk4_endpoint(start.r, h, n_steps, start.as_array(), params.epsilon, params.lam,
                             DIVERGENCE_LIMIT)
    if done < n_steps:
        raise DivergenceError(start.r + done * h)
    return OdeState(r_end, *y)


EXACT = "exact"


def estimate_order(params: Params, start: OdeState, r_end: float = 1.0,
                   n_coarse: int = 100) -> float | str:
    """Observed convergence order from runs with n, 2n and 4n steps.

    Returns :data:`EXACT` when the coarse and medium runs already agree
    to the last bit (e.g. a constant solution).
    """
    ends = [integrate_endpoint(start, r_end, n_coarse * k, params).as_array() for k in (1, 2, 4)]
    e1 = np.max(np.abs(ends[0] - ends[1]))
    e2 = np.max(np.abs(ends[1] - ends[2]))
    if e1 == 0.0 or e2 == 0.0:
        return EXACT
    return float(np.log2(e1 / e2))
