"""Spherical averages of the density and one-sided radial derivatives.

The average of rho over a sphere of radius r about a point x0,

    rho_av(x0; r) = (1/4pi) * integral rho(x0 + r*u) dOmega(u),

is evaluated by Lebedev quadrature.  Averaging kills all odd angular terms
of smooth contributions, so about a cusped center the one-sided expansion
is rho_av(r) = rho(x0) + a1*r + a2*r^2 + ... where a1 carries only the
cusped term's slope.  The limit derivative a1 is recovered from divided
differences on a geometrically shrinking radius ladder, accelerated by
Richardson extrapolation in integer powers of r with early stopping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityModel, evaluate, evaluate_many
from .errors import ZeroCenterValue
from .lebedev import lebedev_grid

__all__ = [
    "DEFAULT_ORDER",
    "SphericalAverageProfile",
    "RadialDerivativeEstimate",
    "spherical_average",
    "average_profile",
    "radial_derivative_at_center",
]

DEFAULT_ORDER = 194
DEFAULT_R0 = 1e-2
DEFAULT_SHRINK = 0.5
DEFAULT_LEVELS = 20
DEFAULT_TOL = 1e-8

# below this the center value gives a meaningless log-derivative
ZERO_VALUE_FLOOR = 1e-30


def spherical_average(model: DensityModel, center, radius: float, order: int = DEFAULT_ORDER) -> float:
    """Average of the density over the sphere |x - center| = radius."""
    if radius <= 0.0:
        raise ValueError(f"radius must be > 0, got {radius}")
    units, weights = lebedev_grid(order)
    c = np.asarray(center, dtype=float).reshape(3)
    values = evaluate_many(model, c[None, :] + radius * units)
    return float(np.dot(weights, values))


@dataclass(frozen=True)
class SphericalAverageProfile:
    """Averages on a strictly decreasing geometric radius ladder."""

    center: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    value_at_center: float

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if np.any(r <= 0.0) or np.any(np.diff(r) >= 0.0):
            raise ValueError("radii must be strictly decreasing and positive")
        if np.any(np.asarray(self.values) < 0.0):
            raise ValueError("averaged density values must be nonnegative")


def average_profile(
    model: DensityModel,
    center,
    r0: float = DEFAULT_R0,
    shrink: float = DEFAULT_SHRINK,
    levels: int = DEFAULT_LEVELS,
    order: int = DEFAULT_ORDER,
) -> SphericalAverageProfile:
    """Profile rho_av(r_k) on r_k = r0 * shrink^k, k = 0..levels-1."""
    if not 0.0 < shrink < 1.0:
        raise ValueError(f"shrink factor must lie in (0, 1), got {shrink}")
    c = np.asarray(center, dtype=float).reshape(3)
    radii = r0 * shrink ** np.arange(levels)
    values = np.array([spherical_average(model, c, r, order) for r in radii])
    return SphericalAverageProfile(center=c, radii=radii, values=values, value_at_center=evaluate(model, c))


@dataclass(frozen=True)
class RadialDerivativeEstimate:
    """One-sided derivative of rho_av at r -> 0+ about a fixed center.

    uncertainty is quoted on the log-derivative (i.e. the last diagonal
    difference divided by rho(center)), which makes both the convergence
    test and the estimate invariant under scaling of the density.
    """

    derivative: float
    log_derivative: float
    uncertainty: float
    converged: bool
    levels_used: int


def radial_derivative_at_center(
    model: DensityModel,
    center,
    r0: float = DEFAULT_R0,
    shrink: float = DEFAULT_SHRINK,
    max_levels: int = DEFAULT_LEVELS,
    tol: float = DEFAULT_TOL,
    order: int = DEFAULT_ORDER,
) -> RadialDerivativeEstimate:
    """Estimate d/dr rho_av(center; r) at r -> 0+ by Richardson extrapolation.

    Divided differences d_k = (rho_av(r_k) - rho(center)) / r_k satisfy
    d_k = a1 + a2*r_k + a3*r_k^2 + ..., so with r_k = r0 * s^k successive
    powers of r are eliminated by

        T[k][j] = (T[k][j-1] - s^j * T[k-1][j-1]) / (1 - s^j).

    Stops as soon as consecutive diagonal entries agree to tol relative to
    rho(center) (equivalently: the log-derivative moves by less than tol);
    early stopping also keeps the ladder away from the cancellation noise
    floor of the divided differences.  When the diagonal differences start
    growing instead (which happens once r_k shrinks to the scale of any
    uncertainty in the center position), the ladder stops and the best
    diagonal entry seen so far is returned.  If no pair of levels agrees to
    tol the best estimate is returned with converged=False rather than
    raising.

    Raises ZeroCenterValue when rho(center) <= 1e-30: the log-derivative
    is numerically meaningless there.
    """
    if r0 <= 0.0:
        raise ValueError(f"r0 must be > 0, got {r0}")
    if not 0.0 < shrink < 1.0:
        raise ValueError(f"shrink factor must lie in (0, 1), got {shrink}")
    c = np.asarray(center, dtype=float).reshape(3)
    rho0 = evaluate(model, c)
    if rho0 <= ZERO_VALUE_FLOOR:
        raise ZeroCenterValue(f"density at center is {rho0:g}; log-derivative undefined")

    s = shrink
    tableau: list[list[float]] = []
    best = 0.0
    best_uncertainty = np.inf
    converged = False
    rising = 0
    prev_diff = np.inf
    k = 0
    for k in range(max_levels):
        r_k = r0 * s**k
        d_k = (spherical_average(model, c, r_k, order) - rho0) / r_k
        row = [d_k]
        for j in range(1, k + 1):
            sj = s**j
            row.append((row[j - 1] - sj * tableau[k - 1][j - 1]) / (1.0 - sj))
        tableau.append(row)
        if k == 0:
            best = row[-1]
            continue
        # compared on the log-derivative scale so that the stopping level,
        # and hence the estimate, is exactly invariant under rho -> c*rho
        diff = abs(tableau[k][k] - tableau[k - 1][k - 1]) / rho0
        if diff < best_uncertainty:
            best = tableau[k][k]
            best_uncertainty = diff
        if diff <= tol:
            converged = True
            break
        # guard against the divided differences blowing up once the ladder
        # radii reach the scale of the center's position uncertainty (the
        # anchor value rho(center) then no longer matches the profile limit)
        rising = rising + 1 if diff > prev_diff else 0
        prev_diff = diff
        if k >= 3 and rising >= 2:
            break

    return RadialDerivativeEstimate(
        derivative=best,
        log_derivative=best / rho0,
        uncertainty=float(best_uncertainty),
        converged=converged,
        levels_used=k + 1,
    )
