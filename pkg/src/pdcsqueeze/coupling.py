"""Drive flux, down-conversion coupling chi and Kerr coefficient K.

All rates are returned in rad/s.  The interaction energies that come out of
the junction expansion are divided by hbar on the way out.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit import CONSTANTS, CircuitParameters, PhysicalConstants, check_flux, derive
from .errors import PDCSqueezeError
from .modes import ModeSolution, fundamental_mode

# (a + a^dag)^4 keeps 6 a^dag a a^dag a (plus lower order) under the RWA
KERR_RWA_FACTOR = 6.0


@dataclass(frozen=True)
class CouplingConstants:
    phi_b: float  # Wb
    chi: float  # rad/s
    kerr: float  # rad/s
    omega_a: float  # rad/s
    omega_b: float  # rad/s
    resolved_l_b: float  # m
    auto_resolved: bool = True
    mode: ModeSolution | None = field(default=None, repr=False, compare=False)

    @property
    def kerr_ratio(self) -> float:
        return self.kerr / self.chi if self.chi else math.inf

    @property
    def is_resonant(self) -> bool:
        """omega_b = 2 omega_a to 1e-9 relative."""
        return abs(self.omega_b - 2.0 * self.omega_a) <= 1e-9 * self.omega_b


def resonant_half_length_b(omega_a: float, group_velocity: float) -> float:
    """l_b that puts the half-wave resonance pi v / (2 l_b) at 2 omega_a."""
    return math.pi * group_velocity / (4.0 * omega_a)


def drive_flux_amplitude(params: CircuitParameters, omega_b: float, l_b: float,
                         constants: PhysicalConstants = CONSTANTS) -> float:
    """Flux per unit field amplitude threading the SQUID loop, phi_b in Wb.

    The antinode current sqrt(hbar omega_b / (2 L0 l_b)) produces a 1/r field
    which is integrated over a loop of length s spanning b2 .. b1 + b2.
    """
    if omega_b <= 0 or l_b <= 0:
        raise ValueError("omega_b and l_b must be positive")
    current = math.sqrt(constants.hbar * omega_b / (2.0 * params.inductance_per_length * l_b))
    geometry = math.log((params.loop_width + params.loop_offset) / params.loop_offset)
    return constants.vacuum_permeability * params.loop_length / (2.0 * math.pi) * current * geometry


def coupling_strength(params: CircuitParameters, mode: ModeSolution, phi_b: float,
                      constants: PhysicalConstants = CONSTANTS) -> float:
    """Three-wave coupling chi in rad/s."""
    f = params.external_flux_ratio
    check_flux(f)
    derived = derive(params, constants)
    return (math.tan(math.pi * f) * (phi_b / constants.flux_quantum) * math.pi
            * mode.gap_amplitude**2
            / (4.0 * derived.josephson_inductance * derived.total_capacitance * mode.frequency))


def quartic_coefficient(params: CircuitParameters, mode: ModeSolution,
                        constants: PhysicalConstants = CONSTANTS) -> float:
    """Prefactor of (a + a^dag)^4 in the junction energy, in rad/s."""
    derived = derive(params, constants)
    zpf_sq = constants.hbar * mode.gap_amplitude**2 / (2.0 * derived.total_capacitance * mode.frequency)
    energy = (1.0 / (24.0 * derived.josephson_inductance)
              * (2.0 * math.pi / constants.flux_quantum) ** 2 * zpf_sq**2)
    return energy / constants.hbar


def kerr_coefficient(params: CircuitParameters, mode: ModeSolution,
                     constants: PhysicalConstants = CONSTANTS) -> float:
    """Self-Kerr K of the a^dag a a^dag a term, in rad/s."""
    check_flux(params.external_flux_ratio)
    return KERR_RWA_FACTOR * quartic_coefficient(params, mode, constants)


def compute_coupling(params: CircuitParameters,
                     constants: PhysicalConstants = CONSTANTS) -> CouplingConstants:
    """Solve the fundamental mode and derive every coupling constant from it."""
    mode = fundamental_mode(params)
    derived = derive(params, constants)
    omega_a = mode.frequency
    if params.half_length_b is None:
        l_b = resonant_half_length_b(omega_a, derived.group_velocity)
        omega_b = 2.0 * omega_a
    else:
        l_b = params.half_length_b
        omega_b = math.pi * derived.group_velocity / (2.0 * l_b)
    phi_b = drive_flux_amplitude(params, omega_b, l_b, constants)
    return CouplingConstants(
        phi_b=phi_b,
        chi=coupling_strength(params, mode, phi_b, constants),
        kerr=kerr_coefficient(params, mode, constants),
        omega_a=omega_a,
        omega_b=omega_b,
        resolved_l_b=l_b,
        auto_resolved=params.half_length_b is None,
        mode=mode,
    )


def flux_for_coupling(params: CircuitParameters, target_chi: float,
                      lo: float = 1e-6, hi: float = 0.49, tol: float = 1e-12) -> float:
    """Flux ratio at which chi equals ``target_chi`` (chi rises with flux)."""
    def excess(f):
        return compute_coupling(params.with_flux(f)).chi - target_chi

    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo > 0 or f_hi < 0:
        raise ValueError(f"target chi {target_chi:.6g} rad/s not reachable for flux in [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class CouplingMap:
    flux_grid: np.ndarray
    position_grid: np.ndarray
    chi: np.ndarray  # shape (n_flux, n_position), rad/s
    kerr: np.ndarray
    omega_a: np.ndarray
    errors: dict = field(default_factory=dict)  # (i, j) -> message


def _map_cell(args):
    params, f, x = args
    try:
        c = compute_coupling(params.with_flux(f).with_position_ratio(x))
    except (PDCSqueezeError, ValueError, ArithmeticError) as exc:
        return None, f"{type(exc).__name__}: {exc}"
    return (c.chi, c.kerr, c.omega_a), None


def coupling_map(params: CircuitParameters, flux_grid, position_grid, jobs: int = 1) -> CouplingMap:
    """chi over a (flux, x_J/l_a) grid, re-solving the mode at every cell.

    Failed cells are recorded in ``errors`` and left as NaN.
    """
    flux_grid = np.asarray(flux_grid, dtype=float)
    position_grid = np.asarray(position_grid, dtype=float)
    cells = [(params, float(f), float(x)) for f in flux_grid for x in position_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_map_cell, cells, chunksize=max(1, len(cells) // (4 * jobs))))
    else:
        results = [_map_cell(c) for c in cells]

    shape = (flux_grid.size, position_grid.size)
    chi = np.full(shape, np.nan)
    kerr = np.full(shape, np.nan)
    omega_a = np.full(shape, np.nan)
    errors = {}
    for n, (values, error) in enumerate(results):
        i, j = divmod(n, position_grid.size)
        if error is not None:
            errors[(i, j)] = error
            continue
        chi[i, j], kerr[i, j], omega_a[i, j] = values
    return CouplingMap(flux_grid, position_grid, chi, kerr, omega_a, errors)


COUPLING_HEADER = ["flux_ratio", "x_J/l_a", "chi/2pi [MHz]", "K/2pi [MHz]", "K/chi",
                   "omega_a/2pi [GHz]", "error"]


def coupling_rows(cmap: CouplingMap) -> list[list]:
    """Long-format rows, flux-major, matching COUPLING_HEADER."""
    rows = []
    two_pi = 2.0 * math.pi
    for i, f in enumerate(cmap.flux_grid):
        for j, x in enumerate(cmap.position_grid):
            error = cmap.errors.get((i, j))
            if error is not None:
                rows.append([float(f), float(x), None, None, None, None, error])
                continue
            chi, kerr = cmap.chi[i, j], cmap.kerr[i, j]
            ratio = kerr / chi if chi else math.inf
            rows.append([float(f), float(x), chi / two_pi / 1e6, kerr / two_pi / 1e6, ratio,
                         cmap.omega_a[i, j] / two_pi / 1e9, ""])
    return rows
