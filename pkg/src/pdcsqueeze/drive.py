"""Drive and dissipation parameters shared by the dynamics and steady-state layers."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigError


@dataclass(frozen=True)
class DriveParameters:
    """Classical drive on CWR-B and the two resonator decay rates.

    All rates in rad/s.  ``thermal_na``/``thermal_nb`` only enter the
    inhomogeneous noise terms of the moment equations.
    """

    rabi_frequency: float
    kappa_a: float
    kappa_b: float
    thermal_na: float = 0.0
    thermal_nb: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.rabi_frequency) and self.rabi_frequency >= 0):
            raise ConfigError(f"rabi_frequency must be >= 0, got {self.rabi_frequency!r}")
        for name in ("kappa_a", "kappa_b"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive, got {value!r}")
        for name in ("thermal_na", "thermal_nb"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"{name} must be >= 0, got {value!r}")

    def with_rabi(self, rabi_frequency: float) -> DriveParameters:
        return replace(self, rabi_frequency=rabi_frequency)


def reference_drive() -> DriveParameters:
    """kappa_a/2pi = 2 MHz, kappa_b = 0.1 kappa_a, Omega_d/2pi = 0.03 MHz."""
    kappa_a = 2.0 * math.pi * 2e6
    return DriveParameters(
        rabi_frequency=2.0 * math.pi * 0.03e6,
        kappa_a=kappa_a,
        kappa_b=0.1 * kappa_a,
    )
