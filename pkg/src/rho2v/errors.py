"""Exception types raised across the package.

Every error that callers are expected to branch on gets its own class;
generic misuse (bad argument types, malformed values) raises ValueError.
"""

from __future__ import annotations


class Rho2vError(Exception):
    """Base class for all package-specific errors."""


class AtCuspSingularity(Rho2vError):
    """Gradient/Hessian requested at a point where the density is not smooth."""


class ZeroDensity(Rho2vError):
    """Normalization requested for a model with vanishing total integral."""


class UnsupportedOrder(Rho2vError):
    """Requested angular grid size is not in the supported Lebedev set."""


class ZeroCenterValue(Rho2vError):
    """Log-derivative requested where the density value is numerically zero."""


class EmptyResult(Rho2vError):
    """Critical-point search converged from no seed (flat or zero model)."""


class NoCuspsFound(Rho2vError):
    """Density has no cusp maxima; Coulomb-frame reconstruction impossible.

    Carries the smooth critical points that *were* found so callers can
    report what the density looks like instead.
    """

    def __init__(self, message: str, critical_points=None):
        super().__init__(message)
        self.critical_points = list(critical_points) if critical_points else []


class QuadratureNotConverged(Rho2vError):
    """Doubling the radial node count moved the result beyond tolerance."""


class NodeEncountered(Rho2vError):
    """Wavefunction is non-positive at a sample point of the inversion grid."""


class MassMismatch(Rho2vError):
    """Source and target radial densities carry different electron counts."""


class NonMonotoneCumulative(Rho2vError):
    """Target cumulative charge is flat over a bracket (density hole)."""


class SpecError(Rho2vError):
    """A density spec file failed validation; message names the field."""
