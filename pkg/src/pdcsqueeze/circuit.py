"""Physical constants, circuit parameters and derived lumped quantities.

Energies (Josephson, charging) are carried in angular-frequency units,
i.e. energy / hbar in rad/s.  A value quoted as "E_J/2pi = 600 GHz" is
therefore stored as ``2 * pi * 600e9``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

from scipy import constants as _codata

from .errors import ConfigError, FluxOutOfRange

if TYPE_CHECKING:
    from .coupling import CouplingConstants

TWO_PI = 2.0 * math.pi

# hard limit of the model (cos(pi f) > 0) and the soft limit applied to configs
FLUX_HARD_LIMIT = 0.5
FLUX_SOFT_LIMIT = 0.49


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants in SI units."""

    hbar: float = _codata.hbar
    flux_quantum: float = _codata.h / (2.0 * _codata.e)
    vacuum_permeability: float = _codata.mu_0
    boltzmann: float = _codata.k
    elementary_charge: float = _codata.e


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class CircuitParameters:
    """Full input record of the two-resonator circuit.

    Attributes
    ----------
    half_length_a : float
        Half length l_a of the SQUID-loaded resonator in m.
    capacitance_per_length, inductance_per_length : float
        C0 in F/m and L0 in H/m, shared by both resonators.
    josephson_energy, charging_energy : float
        SQUID E_J and E_C in rad/s.
    squid_position : float
        Junction coordinate x_J in m, measured from the resonator centre.
    external_flux_ratio : float
        Static flux bias f = Phi'_e / Phi0.
    loop_length, loop_width, loop_offset : float
        SQUID loop geometry s, b1, b2 in m.
    half_length_b : float or None
        Half length l_b of the drive resonator; ``None`` resolves it so that
        omega_b = 2 omega_a.
    """

    half_length_a: float
    capacitance_per_length: float
    inductance_per_length: float
    josephson_energy: float
    charging_energy: float
    squid_position: float
    external_flux_ratio: float
    loop_length: float
    loop_width: float
    loop_offset: float
    half_length_b: float | None = None

    def __post_init__(self):
        positive = {
            "half_length_a": self.half_length_a,
            "capacitance_per_length": self.capacitance_per_length,
            "inductance_per_length": self.inductance_per_length,
            "josephson_energy": self.josephson_energy,
            "charging_energy": self.charging_energy,
            "loop_length": self.loop_length,
            "loop_width": self.loop_width,
            "loop_offset": self.loop_offset,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        if self.half_length_b is not None and not self.half_length_b > 0:
            raise ConfigError(f"half_length_b must be positive, got {self.half_length_b!r}")
        if not abs(self.squid_position) < self.half_length_a:
            raise ConfigError("squid position must lie strictly inside the resonator")
        check_flux(self.external_flux_ratio)

    @property
    def position_ratio(self) -> float:
        return self.squid_position / self.half_length_a

    def with_flux(self, flux_ratio: float) -> CircuitParameters:
        return replace(self, external_flux_ratio=flux_ratio)

    def with_position_ratio(self, ratio: float) -> CircuitParameters:
        return replace(self, squid_position=ratio * self.half_length_a)


def check_flux(flux_ratio: float, allow_extreme: bool = True) -> None:
    """Raise FluxOutOfRange unless ``0 <= f < 0.5`` (``<= 0.49`` when not extreme)."""
    if not math.isfinite(flux_ratio) or flux_ratio < 0 or flux_ratio >= FLUX_HARD_LIMIT:
        raise FluxOutOfRange(f"flux ratio out of range: {flux_ratio!r} (need 0 <= f < 0.5)")
    if not allow_extreme and flux_ratio > FLUX_SOFT_LIMIT:
        raise FluxOutOfRange(
            f"flux ratio out of range: {flux_ratio!r} exceeds {FLUX_SOFT_LIMIT} "
            "(pass --allow-extreme-flux to override)"
        )


def reference_circuit(flux_ratio: float = 0.45, position_ratio: float = 0.25,
                      loop_width: float = 10e-6) -> CircuitParameters:
    """The 12 mm resonator with E_J/2pi = 600 GHz used throughout the tests.

    The loop width only enters through ln((b1 + b2)/b2) with b2 = b1/2, so
    its absolute value is arbitrary.
    """
    half_length_a = 6e-3
    return CircuitParameters(
        half_length_a=half_length_a,
        capacitance_per_length=1.8e-10,
        inductance_per_length=4.5e-7,
        josephson_energy=TWO_PI * 600e9,
        charging_energy=TWO_PI * 1e9,
        squid_position=position_ratio * half_length_a,
        external_flux_ratio=flux_ratio,
        loop_length=0.05 * 2 * half_length_a,
        loop_width=loop_width,
        loop_offset=0.5 * loop_width,
    )


@dataclass(frozen=True)
class DerivedCircuit:
    """Lumped quantities that follow from a parameter record."""

    effective_josephson_energy: float  # rad/s
    josephson_inductance: float  # H
    junction_capacitance: float  # F
    total_capacitance: float  # F
    group_velocity: float  # m/s
    constants: PhysicalConstants = field(default=CONSTANTS, repr=False)


def effective_josephson_energy(params: CircuitParameters) -> float:
    """E_J cos(pi f) in rad/s."""
    check_flux(params.external_flux_ratio)
    return params.josephson_energy * math.cos(math.pi * params.external_flux_ratio)


def josephson_inductance(params: CircuitParameters,
                         constants: PhysicalConstants = CONSTANTS) -> float:
    """L_J = (Phi0 / 2pi)^2 / (hbar E_J(f)), in henry."""
    reduced_flux = constants.flux_quantum / TWO_PI
    return reduced_flux**2 / (constants.hbar * effective_josephson_energy(params))


def junction_capacitance(params: CircuitParameters,
                         constants: PhysicalConstants = CONSTANTS) -> float:
    # E_C = (2e)^2 / (2 C_J) with E_C in joules
    charge = 2.0 * constants.elementary_charge
    return charge**2 / (2.0 * constants.hbar * params.charging_energy)


def derive(params: CircuitParameters,
           constants: PhysicalConstants = CONSTANTS) -> DerivedCircuit:
    c_j = junction_capacitance(params, constants)
    return DerivedCircuit(
        effective_josephson_energy=effective_josephson_energy(params),
        josephson_inductance=josephson_inductance(params, constants),
        junction_capacitance=c_j,
        total_capacitance=2.0 * params.capacitance_per_length * params.half_length_a + c_j,
        group_velocity=1.0 / math.sqrt(params.capacitance_per_length * params.inductance_per_length),
        constants=constants,
    )


def thermal_occupation(frequency: float, temperature: float,
                       constants: PhysicalConstants = CONSTANTS) -> float:
    """Bose-Einstein occupation of a mode at angular frequency ``frequency``."""
    if frequency <= 0:
        raise ValueError("frequency must be positive")
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0:
        return 0.0
    x = constants.hbar * frequency / (constants.boltzmann * temperature)
    # exp(-x) / (1 - exp(-x)) stays finite where expm1(x) would overflow
    return math.exp(-x) / -math.expm1(-x)


@dataclass(frozen=True)
class RegimeReport:
    """Validity ratios of the approximations behind the interaction model."""

    phase_ratio: float  # E_J(f) / E_C, want >= 10
    flux_ratio: float  # 2 |beta| phi_b / Phi'_e, want <= 1e-2
    rwa_ratio: float  # chi / omega_a, want <= 1e-2
    phase_ok: bool
    flux_ok: bool
    rwa_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.phase_ok and self.flux_ok and self.rwa_ok


def validate_regime(params: CircuitParameters, coupling: CouplingConstants,
                    beta_scale: float, constants: PhysicalConstants = CONSTANTS) -> RegimeReport:
    """Report (never raise) on the phase-regime, flux-hierarchy and RWA conditions.

    ``beta_scale`` is the typical drive-resonator amplitude |beta|; the
    quantized flux is then of order 2 |beta| phi_b.
    """
    phase_ratio = effective_josephson_energy(params) / params.charging_energy
    static_flux = params.external_flux_ratio * constants.flux_quantum
    if static_flux > 0:
        flux_ratio = coupling.phi_b * 2.0 * beta_scale / static_flux
    else:
        flux_ratio = math.inf
    rwa_ratio = coupling.chi / coupling.omega_a
    return RegimeReport(
        phase_ratio=phase_ratio,
        flux_ratio=flux_ratio,
        rwa_ratio=rwa_ratio,
        phase_ok=phase_ratio >= 10.0,
        flux_ok=flux_ratio <= 1e-2,
        rwa_ok=rwa_ratio <= 1e-2,
    )
