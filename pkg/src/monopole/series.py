"""Taylor expansion of the monopole profiles at the regular singular point r = 0.

Near the origin ``phi`` is odd and ``gamma`` even::

    phi(r)   = a1 r + a3 r**3 + a5 r**5 + ...
    gamma(r) = b2 r**2 + b4 r**4 + ...

Only ``a1`` and ``b2`` are free.  Multiplying the phi equation by r**2
and matching the coefficient of r**n gives

    (n + 2)(n - 1) a_n = 8 [phi gamma]_n + 8 [phi gamma**2]_n
                         + 2 lam ([phi**3]_{n-2} - a_{n-2})

and, for the gamma equation,

    (n - 2)(n + 1) b_n = (2/eps) [phi**2 (1 + 2 gamma)]_{n-2}
                         + 6 [gamma**2]_n + 4 [gamma**3]_n

where ``[f]_k`` is the r**k coefficient of a Cauchy product.  The right
hand sides only involve already known coefficients provided b_{n-1} is
computed before a_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from monopole.model import ModelError, OdeState, Params

DEFAULT_ORDER = 10
MAX_ORDER = 64
BLOWUP_LIMIT = 1e12


class SeriesConfigError(ModelError):
    """Unsupported truncation order."""


class SeriesBlowupError(ArithmeticError):
    """A Taylor coefficient exceeded the blow-up guard."""

    def __init__(self, index: int, value: float):
        super().__init__(f"coefficient of r^{index} is {value:.3e}, beyond {BLOWUP_LIMIT:.0e}")
        self.index = index
        self.value = value


@dataclass(frozen=True)
class SeedCoeffs:
    a1: float
    b2: float

    def __post_init__(self):
        object.__setattr__(self, "a1", float(self.a1))
        object.__setattr__(self, "b2", float(self.b2))
        if not (math.isfinite(self.a1) and math.isfinite(self.b2)):
            raise ModelError(f"seed coefficients must be finite, got {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.b2])


@dataclass(frozen=True, eq=False)
class TaylorSeries:
    """Truncated series: ``a`` holds a_1, a_3, ..., a_{N+1}; ``b`` holds b_2, ..., b_N."""

    params: Params
    seed: SeedCoeffs
    order: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.a.shape != (self.order // 2 + 1,) or self.b.shape != (self.order // 2,):
            raise ModelError("coefficient arrays inconsistent with order")
        if self.a[0] != self.seed.a1 or self.b[0] != self.seed.b2:
            raise ModelError("leading coefficients must equal the seed")

    def phi_coeff(self, n: int) -> float:
        """Coefficient of r**n in phi (zero for even n)."""
        return float(self.a[(n - 1) // 2]) if n % 2 == 1 and 1 <= n <= self.order + 1 else 0.0

    def gamma_coeff(self, n: int) -> float:
        """Coefficient of r**n in gamma (zero for odd n)."""
        return float(self.b[n // 2 - 1]) if n % 2 == 0 and 2 <= n <= self.order else 0.0

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Full power-indexed coefficient vectors ``(phi, gamma)`` of length N + 2."""
        p = np.zeros(self.order + 2)
        g = np.zeros(self.order + 2)
        p[1::2] = self.a
        g[2::2] = self.b
        return p, g


def _conv(x, y, n):
    # r**n coefficient of x*y using entries 0..n
    return sum(x[i] * y[n - i] for i in range(n + 1))


def recurrence_coeffs(a1, b2, epsilon, lam, order: int, guard: bool = False):
    """Power-indexed coefficient lists ``(phi, gamma)`` of length ``order + 2``.

    Plain arithmetic only, so ``Fraction`` or ``mpmath.mpf`` inputs give
    exact or extended-precision coefficients.
    """
    zero = a1 * 0
    size = order + 2
    p = [zero] * size  # phi coefficients by power
    g = [zero] * size  # gamma coefficients by power
    p[1], g[2] = a1, b2
    # running Cauchy products, filled in as the coefficients they need appear
    p2 = [zero] * size
    g2 = [zero] * size
    for n in range(3, size):
        if n % 2 == 0:
            # gamma coefficient b_n
            m = n - 2
            p2[m] = _conv(p, p, m)
            g2[n] = _conv(g, g, n)
            rhs = 2 * (p2[m] + 2 * _conv(p2, g, m)) / epsilon + 6 * g2[n] + 4 * _conv(g2, g, n)
            g[n] = rhs / ((n - 2) * (n + 1))
            if guard:
                _guard(n, g[n])
        else:
            # phi coefficient a_n; b_{n-1} is already known
            g2[n - 1] = _conv(g, g, n - 1)
            p3 = _conv(p2, p, n - 2)
            p2[n - 1] = _conv(p, p, n - 1)
            rhs = 8 * _conv(p, g, n) + 8 * _conv(p, g2, n) + 2 * lam * (p3 - p[n - 2])
            p[n] = rhs / ((n + 2) * (n - 1))
            if guard:
                _guard(n, p[n])
    return p, g


def compute_coeffs(seed: SeedCoeffs, params: Params, order: int = DEFAULT_ORDER) -> TaylorSeries:
    """Coefficients a_1..a_{N+1} and b_2..b_N generated from the seed by recursion."""
    if not isinstance(order, (int, np.integer)) or order % 2 or not 2 <= order <= MAX_ORDER:
        raise SeriesConfigError(f"order must be an even integer in [2, {MAX_ORDER}], got {order!r}")
    order = int(order)
    p, g = recurrence_coeffs(seed.a1, seed.b2, params.epsilon, params.lam, order, guard=True)
    return TaylorSeries(params, seed, order, np.array(p[1::2], dtype=float), np.array(g[2::2], dtype=float))


def _guard(n: int, value: float) -> None:
    if not abs(value) <= BLOWUP_LIMIT:
        raise SeriesBlowupError(n, float(value))


def eval_series_arrays(series: TaylorSeries, r) -> tuple[np.ndarray, ...]:
    """Vectorised ``(gamma, dgamma, phi, dphi)`` at radii ``r``."""
    r = np.asarray(r, dtype=float)
    p, g = series.dense()
    powers = np.arange(p.size)
    gamma = np.polynomial.polynomial.polyval(r, g)
    phi = np.polynomial.polynomial.polyval(r, p)
    dgamma = np.polynomial.polynomial.polyval(r, (g * powers)[1:])
    dphi = np.polynomial.polynomial.polyval(r, (p * powers)[1:])
    return gamma, dgamma, phi, dphi


def eval_series(series: TaylorSeries, r: float) -> OdeState:
    """Series value and term-wise derivative at a radius inside the handoff region."""
    values = eval_series_arrays(series, float(r))
    return OdeState(float(r), *(float(v) for v in values))


def closed_form_coeffs(seed: SeedCoeffs, params: Params) -> dict[str, float]:
    """Closed-form a_3 .. b_10, expanded by hand from the first recursion steps."""
    a1, b2 = seed.a1, seed.b2
    lam = params.lam
    ie = 1.0 / params.epsilon
    a3 = (4 * a1 * b2 - lam * a1) / 5
    b4 = (3 * b2**2 + ie * a1**2) / 5
    a5 = (4 * a1 * b4 + 4 * a3 * b2 + 4 * a1 * b2**2 + lam * (a1**3 - a3)) / 14
    b6 = (b2**3 + 3 * b2 * b4 + ie * (a1 * a3 + a1**2 * b2)) / 7
    a7 = (4 * (a1 * b6 + a3 * b4 + a5 * b2 + a3 * b2**2 + 2 * a1 * b2 * b4)
          + lam * (3 * a1**2 * a3 - a5)) / 27
    b8 = (3 * (2 * b2**2 * b4 + b4**2 + 2 * b2 * b6)
          + ie * (a3**2 + 2 * a1 * a5 + 2 * a1**2 * b4 + 4 * a1 * a3 * b2)) / 27
    a9 = (4 * (a1 * b8 + a3 * b6 + a5 * b4 + a7 * b2 + a5 * b2**2
               + 2 * a3 * b2 * b4 + a1 * b4**2 + 2 * a1 * b2 * b6)
          + lam * (3 * a1**2 * a5 + 3 * a1 * a3**2 - a7)) / 44
    b10 = (3 * (b2**2 * b6 + b2 * b4**2 + b2 * b8 + b4 * b6)
           + ie * (a1 * a7 + a3 * a5 + a1**2 * b6 + a3**2 * b2
                   + 2 * a1 * a3 * b4 + 2 * a1 * a5 * b2)) / 22
    return {"a1": a1, "b2": b2, "a3": a3, "b4": b4, "a5": a5, "b6": b6,
            "a7": a7, "b8": b8, "a9": a9, "b10": b10}


def verify_against_paper(seed: SeedCoeffs, params: Params) -> float:
    """Max relative deviation between the recursion and the closed-form coefficients.

    Relative to ``max(|closed form|, 1e-300)``; exact zeros on both sides
    count as zero deviation.
    """
    series = compute_coeffs(seed, params, DEFAULT_ORDER)
    worst = 0.0
    for name, ref in closed_form_coeffs(seed, params).items():
        n = int(name[1:])
        got = series.phi_coeff(n) if name[0] == "a" else series.gamma_coeff(n)
        if got == ref:
            continue
        worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    return worst
