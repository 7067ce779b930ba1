"""Variational cross-energy audit on exactly solvable one-electron systems.

For a single nucleus of charge Z the ground state is psi = sqrt(Z^3/pi)
exp(-Z r) with energy -Z^2/2, so every ingredient of the uniqueness
argument's inequality chain is available both analytically and by radial
quadrature:

    ground energies          E_a = <psi_a | T + v_a | psi_a>
    cross energies           <psi_b | T + v_a | psi_b>
    difference integrals     int (v_1 - v_2) rho

together with the identity cross = E_own + difference-integral that links
them.  Constant potential shifts are carried as an explicit tagged offset
so that "equal up to an additive constant" is testable exactly.  The audit
classifies each pair into the four-way case split (I: same state, II: all
different, III: structurally impossible, IV: same density under genuinely
different potentials) and, in case IV, cross-checks the cusp machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import DensityModel, NuclearFrame, hydrogenic_model
from .errors import NodeEncountered
from .inversion import IncompatibilityVerdict, incompatibility_check
from .radial import DEFAULT_NODES, converged, frame_attraction, integrate_decaying, model_moment

__all__ = [
    "ExponentialWavefunction",
    "GaussianWavefunction",
    "OneElectronSystem",
    "PotentialTable",
    "HKAuditReport",
    "ground_energy",
    "cross_energy",
    "difference_integral",
    "potential_from_wavefunction",
    "audit_pair",
]


@dataclass(frozen=True)
class ExponentialWavefunction:
    """psi(r) = amplitude * exp(-decay * r); hydrogenic for decay = Z."""

    decay: float
    amplitude: float = 1.0

    def value(self, r):
        return self.amplitude * np.exp(-self.decay * np.asarray(r, dtype=float))

    def radial_derivative(self, r):
        return -self.decay * self.value(r)

    def kinetic_ratio(self, r):
        """(T psi)/psi with T = -(1/2) laplacian, away from r = 0."""
        r = np.asarray(r, dtype=float)
        return -0.5 * (self.decay**2 - 2.0 * self.decay / r)

    @classmethod
    def hydrogenic(cls, z: float) -> "ExponentialWavefunction":
        return cls(decay=z, amplitude=math.sqrt(z**3 / math.pi))


@dataclass(frozen=True)
class GaussianWavefunction:
    """psi(r) = amplitude * exp(-width * r^2); harmonic-oscillator form."""

    width: float
    amplitude: float = 1.0

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.amplitude * np.exp(-self.width * r * r)

    def radial_derivative(self, r):
        r = np.asarray(r, dtype=float)
        return -2.0 * self.width * r * self.value(r)

    def kinetic_ratio(self, r):
        r = np.asarray(r, dtype=float)
        return 3.0 * self.width - 2.0 * self.width**2 * r * r


@dataclass(frozen=True)
class OneElectronSystem:
    """Single Coulomb center with its exact one-electron ground state.

    offset is a tagged additive constant on the potential; it shifts the
    energy by exactly offset without touching the wavefunction.
    """

    charge: float
    center: tuple = (0.0, 0.0, 0.0)
    offset: float = 0.0

    def __post_init__(self):
        if self.charge <= 0.0:
            raise ValueError(f"charge must be > 0, got {self.charge}")

    @property
    def frame(self) -> NuclearFrame:
        return NuclearFrame(np.asarray(self.center, dtype=float).reshape(1, 3), np.array([self.charge]))

    @property
    def wavefunction(self) -> ExponentialWavefunction:
        return ExponentialWavefunction.hydrogenic(self.charge)

    @property
    def density(self) -> DensityModel:
        return hydrogenic_model(self.charge, center=self.center)

    @property
    def energy(self) -> float:
        return -0.5 * self.charge**2 + self.offset


def _kinetic(system: OneElectronSystem, nodes: int) -> float:
    """<T> = (1/2) int |psi'|^2 4 pi r^2 dr with the matched-weight rule."""
    z = system.charge
    a2 = z**3 / math.pi
    return integrate_decaying(lambda r: 2.0 * math.pi * z * z * a2 * r * r, 2.0 * z, nodes)


def ground_energy(system: OneElectronSystem, method: str = "analytic", nodes: int = DEFAULT_NODES) -> float:
    """Ground-state energy -Z^2/2 + offset; quadrature path for validation."""
    if method == "analytic":
        return system.energy
    if method == "quadrature":
        return converged(
            lambda n: _kinetic(system, n) + frame_attraction(system.density, system.frame, n),
            nodes,
            label="ground energy",
        ) + system.offset
    raise ValueError(f"unknown method {method!r}")


def cross_energy(psi_system: OneElectronSystem, potential_system: OneElectronSystem, nodes: int = DEFAULT_NODES) -> float:
    """<psi_A | T + v_B | psi_A> by matched radial quadrature.

    For concentric hydrogenic pairs this equals Z_A^2/2 - Z_B*Z_A (plus
    B's offset).  Raises QuadratureNotConverged if doubling the node count
    moves the result by more than 1e-8.
    """
    rho_a = psi_system.density

    def compute(n):
        return _kinetic(psi_system, n) + frame_attraction(rho_a, potential_system.frame, n)

    return converged(compute, nodes, label="cross energy") + potential_system.offset


def difference_integral(
    v1: NuclearFrame,
    v2: NuclearFrame,
    rho: DensityModel,
    offset1: float = 0.0,
    offset2: float = 0.0,
    nodes: int = DEFAULT_NODES,
) -> float:
    """int [v1(x) - v2(x)] rho(x) d^3x, offsets contributing (c1-c2)*N."""

    def compute(n):
        attraction = frame_attraction(rho, v1, n) - frame_attraction(rho, v2, n)
        electrons = 4.0 * math.pi * model_moment(rho, 2, n)
        return attraction + (offset1 - offset2) * electrons

    return converged(compute, nodes, label="difference integral")


@dataclass(frozen=True)
class PotentialTable:
    """Potential recovered from a wavefunction, sampled on a radial grid."""

    radii: np.ndarray
    values: np.ndarray
    energy: float

    def __call__(self, r):
        # exact continuation off the sample grid via the defining relation
        return self._ratio(r)

    _ratio: object = None


def potential_from_wavefunction(psi, energy: float, radii=None) -> PotentialTable:
    """Invert T psi + v psi = E psi to v(r) = E - (T psi)(r)/psi(r).

    Works for any nodeless positive radial wavefunction with an analytic
    kinetic ratio; the potential need not be Coulombic.  Raises
    NodeEncountered when psi is not strictly positive on the sample grid.
    """
    if radii is None:
        radii = np.geomspace(1e-2, 10.0, 64)
    radii = np.asarray(radii, dtype=float)
    vals = psi.value(radii)
    if np.any(vals <= 0.0):
        bad = radii[np.argmax(vals <= 0.0)]
        raise NodeEncountered(f"wavefunction is non-positive at r = {bad:g}")

    def ratio(r):
        return energy - psi.kinetic_ratio(r)

    return PotentialTable(radii=radii, values=ratio(radii), energy=energy, _ratio=ratio)


@dataclass(frozen=True)
class HKAuditReport:
    """All energies, integrals, verdicts, and the case label for one pair."""

    e1: float
    e2: float
    cross12: float
    cross21: float
    diff_integral_rho2: float
    diff_integral_rho1: float
    strict1: bool
    strict2: bool
    wavefunctions_equal: bool
    densities_equal: bool
    potentials_equal_mod_const: bool
    identity_residual_1: float
    identity_residual_2: float
    case: str
    notes: tuple
    tol: float
    cusp_verdict: IncompatibilityVerdict | None = None


_RADIAL_GRID = np.concatenate([[0.0], np.geomspace(1e-3, 20.0, 128)])


def _concentric(a: OneElectronSystem, b: OneElectronSystem) -> bool:
    return bool(
        np.linalg.norm(np.asarray(a.center, dtype=float) - np.asarray(b.center, dtype=float)) <= 1e-9
    )


def audit_pair(system1: OneElectronSystem, system2: OneElectronSystem, tol: float = 1e-9) -> HKAuditReport:
    """Assemble the full inequality audit for a pair of one-electron systems.

    cross12 is <psi_2|H_1|psi_2> and cross21 is <psi_1|H_2|psi_1>; both are
    tied back to the ground energies through the difference integrals, whose
    residuals are recorded.  The case label follows the four-way split; a
    case IV finding triggers the cusp-machinery cross-check on the two
    densities.
    """
    e1 = ground_energy(system1)
    e2 = ground_energy(system2)
    cross12 = cross_energy(system2, system1)
    cross21 = cross_energy(system1, system2)
    rho1 = system1.density
    rho2 = system2.density
    d_rho2 = difference_integral(
        system1.frame, system2.frame, rho2, system1.offset, system2.offset
    )
    d_rho1 = difference_integral(
        system1.frame, system2.frame, rho1, system1.offset, system2.offset
    )

    concentric = _concentric(system1, system2)
    if concentric:
        psi1 = system1.wavefunction.value(_RADIAL_GRID)
        psi2 = system2.wavefunction.value(_RADIAL_GRID)
        rho1_vals = psi1 * psi1
        rho2_vals = psi2 * psi2
        psi_eq = bool(np.max(np.abs(psi1 - psi2)) <= tol)
        rho_eq = bool(np.max(np.abs(rho1_vals - rho2_vals)) <= tol)
        pot_eq = abs(system1.charge - system2.charge) <= tol
    else:
        psi_eq = rho_eq = pot_eq = False

    notes = []
    cusp_check = None
    if psi_eq and rho_eq:
        case = "I"
        if abs(system1.offset - system2.offset) > 0.0:
            notes.append(
                "potentials differ by a pure constant; the energy gap equals "
                "that constant times the electron count"
            )
    elif psi_eq and not rho_eq:
        case = "III"
        notes.append(
            "structurally impossible: a wavefunction determines its density "
            "uniquely, so equal wavefunctions cannot carry different densities"
        )
    elif rho_eq and not pot_eq:
        case = "IV"
        cusp_check = incompatibility_check(rho1, rho2, seeds_per_axis=5)
        notes.append(
            "equal densities under potentials differing beyond a constant; "
            "cusp reconstruction cross-check attached"
        )
    elif not rho_eq:
        case = "II"
    else:
        case = "I"
        notes.append(
            "densities and potentials agree but the wavefunctions differ "
            "numerically (sign artifact); treated as the same state"
        )

    # strict variational gaps, with an equality band so that identical
    # systems (gap exactly zero in exact arithmetic) are not promoted to
    # "strict" by quadrature rounding
    band1 = 1e-10 * max(1.0, abs(e1))
    band2 = 1e-10 * max(1.0, abs(e2))

    return HKAuditReport(
        e1=e1,
        e2=e2,
        cross12=cross12,
        cross21=cross21,
        diff_integral_rho2=d_rho2,
        diff_integral_rho1=d_rho1,
        strict1=bool(cross12 - e1 > band1),
        strict2=bool(cross21 - e2 > band2),
        wavefunctions_equal=psi_eq,
        densities_equal=rho_eq,
        potentials_equal_mod_const=pot_eq,
        identity_residual_1=abs(cross12 - (e2 + d_rho2)),
        identity_residual_2=abs(cross21 - (e1 - d_rho1)),
        case=case,
        notes=tuple(notes),
        tol=tol,
        cusp_verdict=cusp_check,
    )
