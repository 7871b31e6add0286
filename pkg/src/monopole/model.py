"""Reduced Yang-Mills-Higgs model for spherically symmetric monopoles.

Everything here works with the radial profiles ``gamma(r)`` (connection)
and ``phi(r)`` (Higgs field) on the unit ball.  The state layout shared by
every module is ``(gamma, dgamma, phi, dphi)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numba
import numpy as np
from scipy.integrate import simpson

if TYPE_CHECKING:
    from monopole.series import TaylorSeries


class ModelError(ValueError):
    """Invalid input to a model-level operation."""


class DomainError(ModelError):
    """Evaluation requested outside the domain where it is defined."""


class IncompleteDomainError(ModelError):
    """A profile does not reach the outer boundary r = 1."""


@dataclass(frozen=True)
class Params:
    """Curvature weight ``epsilon`` and potential weight ``lam``."""

    epsilon: float
    lam: float

    def __post_init__(self):
        # one numba specialisation: always floats
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "lam", float(self.lam))
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ModelError(f"epsilon must be positive, got {self.epsilon!r}")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ModelError(f"lambda must be nonnegative, got {self.lam!r}")


@dataclass(frozen=True)
class OdeState:
    r: float
    gamma: float
    dgamma: float
    phi: float
    dphi: float

    def __post_init__(self):
        for name in ("r", "gamma", "dgamma", "phi", "dphi"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not all(math.isfinite(v) for v in self.as_tuple(with_r=True)):
            raise ModelError(f"non-finite state component in {self!r}")

    def as_tuple(self, with_r: bool = False) -> tuple[float, ...]:
        y = (self.gamma, self.dgamma, self.phi, self.dphi)
        return (self.r, *y) if with_r else y

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())


class Profile:
    """Sampled trajectory on a strictly increasing grid inside [0, 1].

    ``states`` has shape ``(n, 4)`` with columns ``gamma, dgamma, phi, dphi``.
    ``r_match`` marks where integrated data begins; samples before it (if
    any) were evaluated from the Taylor series.

    gamma is held internally as ``delta = gamma + 1/2`` so that the gauge
    flip ``gamma -> -1 - gamma`` is the exact sign change ``delta -> -delta``;
    ``states[:, 0]`` is recomputed as ``delta - 1/2``.  Values are read-only.
    """

    __slots__ = ("params", "radii", "r_match", "_centered", "_states")
    __hash__ = None

    def __init__(self, params: Params, radii, states, r_match: float | None = None):
        centered = np.array(states, dtype=float)
        if centered.ndim == 2 and centered.shape[1] == 4:
            centered[:, 0] += 0.5
        self._init(params, radii, centered, r_match)

    @classmethod
    def from_centered(cls, params: Params, radii, centered, r_match: float | None = None) -> Profile:
        """Build from ``(delta, dgamma, phi, dphi)`` rows, ``delta = gamma + 1/2``."""
        obj = cls.__new__(cls)
        obj._init(params, radii, np.array(centered, dtype=float), r_match)
        return obj

    def _init(self, params, radii, centered, r_match):
        radii = np.array(radii, dtype=float)
        if radii.ndim != 1 or radii.size < 2:
            raise ModelError("a profile needs at least two samples")
        if centered.shape != (radii.size, 4):
            raise ModelError(f"states shape {centered.shape} does not match radii ({radii.size},)")
        if np.any(np.diff(radii) <= 0):
            raise ModelError("radii must be strictly increasing")
        if radii[0] < 0 or radii[-1] > 1:
            raise ModelError("radii must lie in [0, 1]")
        states = centered.copy()
        states[:, 0] -= 0.5
        for arr in (radii, centered, states):
            arr.setflags(write=False)
        self.params = params
        self.radii = radii
        self.r_match = r_match
        self._centered = centered
        self._states = states

    def __repr__(self) -> str:
        return (f"Profile(params={self.params!r}, n={len(self)}, "
                f"r=[{self.radii[0]!r}, {self.radii[-1]!r}], r_match={self.r_match!r})")

    def __len__(self) -> int:
        return self.radii.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Profile):
            return NotImplemented
        return (
            self.params == other.params
            and self.r_match == other.r_match
            and np.array_equal(self.radii, other.radii)
            and np.array_equal(self._centered, other._centered)
        )

    @property
    def states(self) -> np.ndarray:
        return self._states

    @property
    def centered(self) -> np.ndarray:
        return self._centered

    @property
    def gamma(self) -> np.ndarray:
        return self._states[:, 0]

    @property
    def dgamma(self) -> np.ndarray:
        return self._states[:, 1]

    @property
    def phi(self) -> np.ndarray:
        return self._states[:, 2]

    @property
    def dphi(self) -> np.ndarray:
        return self._states[:, 3]

    @property
    def reaches_boundary(self) -> bool:
        return self.radii[-1] == 1.0

    def state(self, i: int) -> OdeState:
        return OdeState(float(self.radii[i]), *map(float, self._states[i]))

    def final_state(self) -> OdeState:
        return self.state(-1)


# ---------------------------------------------------------------------------
# Right-hand side


@numba.njit(cache=True, nogil=True)
def rhs_kernel(r, g, dg, p, dp, eps, lam):
    """Derivative of ``(gamma, dgamma, phi, dphi)`` at radius ``r > 0``."""
    s = 1.0 + 2.0 * g
    inv_r2 = 1.0 / (r * r)
    d2g = (2.0 / eps) * p * p * s + 2.0 * inv_r2 * (g * g + g) * s
    d2p = -2.0 * dp / r + 2.0 * p * inv_r2 * s * s + 2.0 * lam * p * (p * p - 1.0)
    return dg, d2g, dp, d2p


def rhs(state: OdeState, params: Params) -> tuple[float, float, float, float]:
    """First-order system derivative ``(gamma', gamma'', phi', phi'')``.

    The origin is a regular singular point; near it use
    :func:`monopole.series.eval_series` instead.
    """
    if not state.r > 0:
        raise DomainError(f"rhs is singular at r={state.r}; use the series near the origin")
    return rhs_kernel(state.r, state.gamma, state.dgamma, state.phi, state.dphi,
                      params.epsilon, params.lam)


def second_derivatives(r, gamma, phi, dphi, params: Params):
    """Vectorised ``(gamma'', phi'')`` demanded by the Euler-Lagrange system."""
    r = np.asarray(r, dtype=float)
    s = 1.0 + 2.0 * gamma
    d2g = (2.0 / params.epsilon) * phi**2 * s + 2.0 / r**2 * (gamma**2 + gamma) * s
    d2p = -2.0 * dphi / r + 2.0 * phi / r**2 * s**2 + 2.0 * params.lam * phi * (phi**2 - 1.0)
    return d2g, d2p


# ---------------------------------------------------------------------------
# Action


# Gauss-Legendre nodes for the series segment; r = 0 is added separately.
_GL_POINTS = 33


def action_density(r, gamma, dgamma, phi, dphi, params: Params) -> np.ndarray:
    """Integrand of the reduced action (without the 4*pi prefactor).

    The ``(gamma**2 + gamma)**2 / r**2`` term is taken as its limit 0 at
    r = 0, valid for gamma(0) in {0, -1}.
    """
    r = np.asarray(r, dtype=float)
    q = gamma**2 + gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        centrifugal = np.where(r > 0, 2.0 * q**2 / np.where(r > 0, r, 1.0) ** 2, 0.0)
    return (
        2.0 * params.epsilon * (dgamma**2 + centrifugal)
        + r**2 * dphi**2
        + 2.0 * phi**2 * (1.0 + 2.0 * gamma) ** 2
        + params.lam * r**2 * (phi**2 - 1.0) ** 2
    )


def action(profile: Profile, series: TaylorSeries | None = None) -> float:
    """Total reduced action ``4*pi * integral_0^1 (...) dr``.

    The sampled part is integrated with composite Simpson.  When ``series``
    is given, the profile is used only from ``profile.r_match`` (or its
    first radius) outward and ``[0, r_match]`` is covered by Gauss-Legendre
    quadrature of the series.
    """
    if not profile.reaches_boundary:
        raise IncompleteDomainError(
            f"profile ends at r={profile.radii[-1]!r}, the action needs data up to r=1")
    params = profile.params
    radii, states = profile.radii, profile.states
    total = 0.0
    if series is not None:
        from monopole.series import eval_series_arrays

        r0 = profile.r_match if profile.r_match is not None else float(radii[0])
        keep = radii >= r0
        radii, states = radii[keep], states[keep]
        if r0 > 0:
            x, w = np.polynomial.legendre.leggauss(_GL_POINTS)
            rs = 0.5 * r0 * (x + 1.0)
            y = eval_series_arrays(series, rs)
            total += 0.5 * r0 * float(np.dot(w, action_density(rs, *y, params)))
    elif radii[0] > 0:
        raise IncompleteDomainError(
            f"profile starts at r={radii[0]!r}; pass the series covering [0, r0]")
    dens = action_density(radii, *states.T, params)
    total += float(simpson(dens, x=radii))
    return 4.0 * math.pi * total


# ---------------------------------------------------------------------------
# Euler-Lagrange residual


def _central_second(x: np.ndarray, y: np.ndarray):
    """First and second derivatives at interior nodes of a possibly nonuniform grid."""
    h0 = x[1:-1] - x[:-2]
    h1 = x[2:] - x[1:-1]
    ym, y0, yp = y[:-2], y[1:-1], y[2:]
    d1 = (h0**2 * yp - h1**2 * ym + (h1**2 - h0**2) * y0) / (h0 * h1 * (h0 + h1))
    d2 = 2.0 * (h0 * yp - (h0 + h1) * y0 + h1 * ym) / (h0 * h1 * (h0 + h1))
    return d1, d2


def el_residual(profile: Profile, params: Params | None = None,
                r_min: float = 0.0, r_max: float = 1.0) -> float:
    """Max absolute Euler-Lagrange residual over interior grid points.

    Derivatives come from three-point central differences of the sampled
    ``gamma`` and ``phi``; endpoints (and points at r = 0) are excluded.
    Only samples with ``r_min <= r <= r_max`` take part.
    """
    params = profile.params if params is None else params
    sel = (profile.radii >= r_min) & (profile.radii <= r_max)
    x = profile.radii[sel]
    if x.size < 5:
        raise ModelError("el_residual needs at least 5 samples in the window")
    g, p = profile.gamma[sel], profile.phi[sel]
    _, d2g_fd = _central_second(x, g)
    dp_fd, d2p_fd = _central_second(x, p)
    xi, gi, pi_ = x[1:-1], g[1:-1], p[1:-1]
    ok = xi > 0
    d2g, d2p = second_derivatives(xi[ok], gi[ok], pi_[ok], dp_fd[ok], params)
    res = np.maximum(np.abs(d2g_fd[ok] - d2g), np.abs(d2p_fd[ok] - d2p))
    return float(res.max()) if res.size else 0.0


# ---------------------------------------------------------------------------
# Symmetries


def apply_phi_flip(profile: Profile) -> Profile:
    """Parity symmetry: ``phi -> -phi`` with ``gamma`` unchanged."""
    c = profile.centered.copy()
    c[:, 2:] = -c[:, 2:]
    return Profile.from_centered(profile.params, profile.radii, c, profile.r_match)


def apply_gauge_flip(profile: Profile) -> Profile:
    """Singular gauge symmetry: ``gamma -> -1 - gamma`` with ``phi`` unchanged."""
    c = profile.centered.copy()
    c[:, :2] = -c[:, :2]
    return Profile.from_centered(profile.params, profile.radii, c, profile.r_match)


def monotonicity(profile: Profile) -> dict[str, bool]:
    """Soft diagnostic: is gamma nonincreasing and phi nondecreasing?"""
    return {
        "gamma_nonincreasing": bool(np.all(np.diff(profile.gamma) <= 0)),
        "phi_nondecreasing": bool(np.all(np.diff(profile.phi) >= 0)),
    }


# ---------------------------------------------------------------------------
# Fixed points and stability


class FixedPointId(enum.Enum):
    """The five constant solutions ``(gamma, phi)`` of the radial system."""

    HALF_PLUS = (-0.5, 1.0)
    HALF_MINUS = (-0.5, -1.0)
    HALF_ZERO = (-0.5, 0.0)
    ORIGIN = (0.0, 0.0)
    MINUS_ONE = (-1.0, 0.0)

    @property
    def gamma(self) -> float:
        return self.value[0]

    @property
    def phi(self) -> float:
        return self.value[1]

    def state(self, r: float) -> OdeState:
        return OdeState(r, self.gamma, 0.0, self.phi, 0.0)


# Symmetry partners: phi flip maps HALF_MINUS -> HALF_PLUS, gauge flip maps
# MINUS_ONE -> ORIGIN; linearisations are identical.
_PARTNER = {
    FixedPointId.HALF_MINUS: FixedPointId.HALF_PLUS,
    FixedPointId.MINUS_ONE: FixedPointId.ORIGIN,
}


@dataclass(frozen=True)
class StabilityReport:
    fixed_point: FixedPointId
    r: float
    params: Params
    unstable_mode_count: int
    gamma_mode_stable: bool
    phi_mode_stable: bool
    phi_oscillatory: bool
    gamma_length_scale: float
    phi_length_scale: float

    def to_dict(self) -> dict:
        return {
            "fixed_point": {"gamma": self.fixed_point.gamma, "phi": self.fixed_point.phi},
            "label": self.fixed_point.name,
            "r": self.r,
            "epsilon": self.params.epsilon,
            "lambda": self.params.lam,
            "unstable_mode_count": self.unstable_mode_count,
            "gamma_mode_stable": self.gamma_mode_stable,
            "phi_mode_stable": self.phi_mode_stable,
            "phi_oscillatory": self.phi_oscillatory,
            "gamma_length_scale": self.gamma_length_scale,
            "phi_length_scale": self.phi_length_scale,
        }


def _inv_sqrt(x: float) -> float:
    return math.inf if x == 0 else 1.0 / math.sqrt(x)


def classify_stability(fp: FixedPointId, r: float, params: Params) -> StabilityReport:
    """Linear stability of a fixed point at radius ``r``, by closed-form rules.

    With delta = gamma + 1/2 the gamma mode near gamma = -1/2 obeys
    ``delta'' = 4 delta (phi**2/eps - 1/(4 r**2))``, so it is stable iff
    ``phi**2 r**2 < eps/4``.  Near phi = 1 the Higgs mode is unstable
    (growth rate ``2 sqrt(lam)``); near phi = 0 it oscillates.  At the
    origin gamma grows like r**2 and ``r*phi`` grows while r < 1/sqrt(lam),
    oscillating beyond.
    """
    if not r > 0:
        raise DomainError(f"stability is only defined for r > 0, got {r}")
    base = _PARTNER.get(fp, fp)
    eps, lam = params.epsilon, params.lam
    gamma_scale = math.sqrt(eps) / 2.0
    if base is FixedPointId.HALF_PLUS:
        gamma_stable = r * r < eps / 4.0
        phi_stable = False
        phi_osc = False
        phi_scale = _inv_sqrt(4.0 * lam)
    elif base is FixedPointId.HALF_ZERO:
        gamma_stable = True
        phi_stable = True
        phi_osc = lam > 0
        phi_scale = _inv_sqrt(2.0 * lam)
    else:
        threshold = _inv_sqrt(lam)
        gamma_stable = False
        phi_osc = r > threshold
        phi_stable = phi_osc
        phi_scale = threshold
    return StabilityReport(
        fixed_point=fp,
        r=float(r),
        params=params,
        unstable_mode_count=int(not gamma_stable) + int(not phi_stable),
        gamma_mode_stable=gamma_stable,
        phi_mode_stable=phi_stable,
        phi_oscillatory=phi_osc,
        gamma_length_scale=gamma_scale,
        phi_length_scale=phi_scale,
    )


def length_scales(params: Params) -> tuple[float, float]:
    """Transition widths ``min(sqrt(eps), 1)`` for gamma and ``min(sqrt(eps), 1/sqrt(lam), 1)`` for phi."""
    root_eps = math.sqrt(params.epsilon)
    return min(root_eps, 1.0), min(root_eps, _inv_sqrt(params.lam), 1.0)
