"""Normal modes of the SQUID-loaded resonator.

The flux field on either side of the junction is a standing wave,

    mu(x) = A sin(k (x + l_a) - phi0)        for -l_a <= x < x_J
    mu(x) = A B sin(k (x - l_a) + phi0)      for  x_J < x <= l_a

with phi0 = pi/2 fixed by the open ends.  Current continuity and the
junction's current-phase relation at x_J give the wave-vector condition

    (tan[k(x_J - l_a) + phi0] - tan[k(x_J + l_a) - phi0])
        * [L0 l_a / L_J - (k l_a)^2 C_J / (C0 l_a)] = k l_a

which is poled wherever sin(k(x_J -/+ l_a)) = 0.  Multiplying through by
both sines turns the poles into ordinary zeros:

    R(k l_a) = -sin(2 k l_a) * Y - k l_a * sin(k(x_J - l_a)) * sin(k(x_J + l_a))

with Y the bracketed admittance factor.  Roots are bracketed on a uniform
grid and refined by bisection; zeros where both sines vanish are rejected
because the tan form is undefined there.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitParameters, DerivedCircuit, derive
from .errors import DegenerateMode, RootNotFound

logger = logging.getLogger(__name__)

PHI0 = math.pi / 2
POINTS_PER_PI = 10_000
ROOT_TOLERANCE = 1e-12  # on k * l_a
POLE_TOLERANCE = 1e-8
DENOMINATOR_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ModeSolution:
    index: int
    wavevector: float  # 1/m
    frequency: float  # rad/s
    relative_amplitude: float
    normalization: float
    gap_amplitude: float
    effective_inductance: float  # H
    squid_position: float  # m
    half_length: float  # m

    @property
    def reduced_wavevector(self) -> float:
        """k l_a."""
        return self.wavevector * self.half_length

    def __call__(self, x):
        """Evaluate the mode function at positions ``x`` (m)."""
        x = np.asarray(x, dtype=float)
        k, l_a = self.wavevector, self.half_length
        left = self.normalization * np.sin(k * (x + l_a) - PHI0)
        right = self.normalization * self.relative_amplitude * np.sin(k * (x - l_a) + PHI0)
        return np.where(x < self.squid_position, left, right)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        k, l_a = self.wavevector, self.half_length
        left = self.normalization * k * np.cos(k * (x + l_a) - PHI0)
        right = self.normalization * self.relative_amplitude * k * np.cos(k * (x - l_a) + PHI0)
        return np.where(x < self.squid_position, left, right)


def _line_constants(derived: DerivedCircuit, l_a: float) -> tuple[float, float]:
    """Recover (C0 l_a, L0 l_a) from the lumped quantities."""
    c0_la = 0.5 * (derived.total_capacitance - derived.junction_capacitance)
    c0 = c0_la / l_a
    l0 = 1.0 / (derived.group_velocity**2 * c0)
    return c0_la, l0 * l_a


def _admittance_factor(kl, derived: DerivedCircuit, l_a: float):
    c0_la, l0_la = _line_constants(derived, l_a)
    return l0_la / derived.josephson_inductance - kl**2 * derived.junction_capacitance / c0_la


def transcendental_residual(k, derived: DerivedCircuit, x_J: float, l_a: float):
    """Pole-free residual of the wave-vector condition at wave vector ``k`` (1/m).

    Vectorized over ``k``.  Sign changes coincide with the roots of the
    tan form; the value stays finite at its poles.
    """
    kl = np.asarray(k, dtype=float) * l_a
    xi = x_J / l_a
    s_minus = np.sin(kl * (xi - 1.0))
    s_plus = np.sin(kl * (xi + 1.0))
    return -np.sin(2.0 * kl) * _admittance_factor(kl, derived, l_a) - kl * s_minus * s_plus


def tan_form_residual(k: float, derived: DerivedCircuit, x_J: float, l_a: float) -> float:
    """Residual of the original tan form, or NaN on one of its poles."""
    kl = k * l_a
    xi = x_J / l_a
    s_minus = math.sin(kl * (xi - 1.0))
    s_plus = math.sin(kl * (xi + 1.0))
    if abs(s_minus) < POLE_TOLERANCE or abs(s_plus) < POLE_TOLERANCE:
        return math.nan
    # tan(u + pi/2) = -cot(u), tan(u - pi/2) = -cot(u)
    cot_diff = math.cos(kl * (xi + 1.0)) / s_plus - math.cos(kl * (xi - 1.0)) / s_minus
    return cot_diff * float(_admittance_factor(kl, derived, l_a)) - kl


def _is_genuine_root(kl: float, derived: DerivedCircuit, x_J: float, l_a: float) -> bool:
    xi = x_J / l_a
    s_minus = math.sin(kl * (xi - 1.0))
    s_plus = math.sin(kl * (xi + 1.0))
    if abs(s_minus) < POLE_TOLERANCE and abs(s_plus) < POLE_TOLERANCE:
        # both multipliers vanish: the zero is an artefact of the reformulation
        return False
    if min(abs(s_minus), abs(s_plus)) < 1e-4:
        # next to a single pole the tan form is ill-conditioned; it holds in the
        # limit Y -> 0, which R = 0 already enforces
        return True
    residual = tan_form_residual(kl / l_a, derived, x_J, l_a)
    # slack for the bisection width, amplified by the slope of the tan form
    admittance = abs(float(_admittance_factor(kl, derived, l_a)))
    slope = admittance * (abs(xi + 1.0) / s_plus**2 + abs(xi - 1.0) / s_minus**2) + 1.0
    return abs(residual) <= 1e-6 * (1.0 + kl) + 10.0 * slope * ROOT_TOLERANCE


def _bisect(fun, lo: np.ndarray, hi: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized bisection on sign-changing brackets [lo, hi]."""
    lo = lo.copy()
    hi = hi.copy()
    f_lo = fun(lo)
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        f_mid = fun(mid)
        left = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, f_mid, f_lo)
        hi = np.where(left, hi, mid)
        exact = f_mid == 0
        lo = np.where(exact, mid, lo)
        hi = np.where(exact, mid, hi)
    return 0.5 * (lo + hi)


def _scan_roots(derived: DerivedCircuit, x_J: float, l_a: float, window: float,
                points_per_pi: int) -> tuple[np.ndarray, int]:
    n_points = max(int(round(points_per_pi * window / math.pi)), 2)
    grid = np.linspace(0.0, window, n_points + 1)[1:]

    def residual(kl):
        return transcendental_residual(kl / l_a, derived, x_J, l_a)

    values = residual(grid)
    signs = np.sign(values)
    change = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    on_grid = grid[np.nonzero(signs == 0)[0]]
    refined = _bisect(residual, grid[change], grid[change + 1], ROOT_TOLERANCE) if change.size else np.empty(0)
    candidates = np.sort(np.concatenate([refined, on_grid]))
    accepted = [kl for kl in candidates if _is_genuine_root(float(kl), derived, x_J, l_a)]
    rejected = len(candidates) - len(accepted)
    if rejected:
        logger.debug("rejected %d spurious zero(s) of the reformulated residual", rejected)
    return np.asarray(accepted, dtype=float), rejected


def solve_wavevectors(params: CircuitParameters, n_modes: int,
                      points_per_pi: int = POINTS_PER_PI) -> np.ndarray:
    """Return the ``n_modes`` smallest positive wave vectors (1/m), ascending."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    derived = derive(params)
    l_a = params.half_length_a
    window = n_modes * math.pi
    for attempt in range(2):
        roots, _ = _scan_roots(derived, params.squid_position, l_a, window, points_per_pi)
        if roots.size >= n_modes:
            logger.info("fundamental root k1*l_a = %.12g (flux %.6g, x_J/l_a %.6g)",
                        roots[0], params.external_flux_ratio, params.position_ratio)
            return roots[:n_modes] / l_a
        if attempt == 0:
            window *= 2.0
    raise RootNotFound(
        f"found {roots.size} of {n_modes} roots in scan window k*l_a in (0, {window:.6g}]"
    )


def relative_amplitude(k_m: float, x_J: float, l_a: float) -> float:
    """Amplitude B_m of the right-hand segment relative to the left one."""
    # cos(u - pi/2) = sin(u), cos(u + pi/2) = -sin(u)
    numerator = math.sin(k_m * (x_J + l_a))
    denominator = -math.sin(k_m * (x_J - l_a))
    if abs(denominator) < DENOMINATOR_TOLERANCE:
        raise DegenerateMode(f"relative amplitude denominator vanishes at k*l_a = {k_m * l_a:.12g}")
    return numerator / denominator


def _segment_sin2_integral(k: float, length: float) -> float:
    # integral of cos^2(k y) for y in [0, length]
    return 0.5 * length + math.sin(2.0 * k * length) / (4.0 * k)


def normalize_mode(k_m: float, B_m: float, params: CircuitParameters) -> tuple[float, float]:
    """Return (A_m, Delta_m) with <mu_m, mu_m> = C_Sigma in closed form."""
    derived = derive(params)
    l_a = params.half_length_a
    x_J = params.squid_position
    c0 = params.capacitance_per_length
    left = _segment_sin2_integral(k_m, x_J + l_a)
    right = _segment_sin2_integral(k_m, l_a - x_J)
    # unit-amplitude jump across the junction
    jump = B_m * math.sin(k_m * (x_J - l_a) + PHI0) - math.sin(k_m * (x_J + l_a) - PHI0)
    weight = c0 * (left + B_m**2 * right) + derived.junction_capacitance * jump**2
    amplitude = math.sqrt(derived.total_capacitance / weight)
    return amplitude, amplitude * jump


def solve_modes(params: CircuitParameters, n_modes: int = 1) -> list[ModeSolution]:
    derived = derive(params)
    solutions = []
    for index, k in enumerate(solve_wavevectors(params, n_modes), start=1):
        b = relative_amplitude(k, params.squid_position, params.half_length_a)
        a, gap = normalize_mode(k, b, params)
        omega = k * derived.group_velocity
        solutions.append(ModeSolution(
            index=index,
            wavevector=k,
            frequency=omega,
            relative_amplitude=b,
            normalization=a,
            gap_amplitude=gap,
            effective_inductance=1.0 / (derived.total_capacitance * omega**2),
            squid_position=params.squid_position,
            half_length=params.half_length_a,
        ))
    return solutions


def fundamental_mode(params: CircuitParameters) -> ModeSolution:
    return solve_modes(params, 1)[0]


MODE_TABLE_HEADER = ["m", "k_m*l_a", "omega_m/2pi [GHz]", "B_m", "A_m", "Delta_m"]


def mode_table_rows(solutions: list[ModeSolution]) -> list[list]:
    return [
        [s.index, s.reduced_wavevector, s.frequency / (2 * math.pi) / 1e9,
         s.relative_amplitude, s.normalization, s.gap_amplitude]
        for s in solutions
    ]


def mode_function_rows(solutions: list[ModeSolution], n_points: int = 201) -> tuple[list[str], list[list]]:
    """Sampled mode functions on a uniform grid of x / l_a in [-1, 1]."""
    if not solutions:
        return ["x/l_a"], []
    l_a = solutions[0].half_length
    ratios = np.linspace(-1.0, 1.0, n_points)
    columns = [s(ratios * l_a) for s in solutions]
    header = ["x/l_a"] + [f"mu_{s.index}" for s in solutions]
    rows = [[float(r)] + [float(c[i]) for c in columns] for i, r in enumerate(ratios)]
    return header, rows
