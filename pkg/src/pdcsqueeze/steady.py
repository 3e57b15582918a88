"""Closed-form steady states of the driven down-conversion model.

The mean-field equations without Kerr,

    d alpha/dt = 2 i chi alpha* beta - (kappa_a/2) alpha
    d beta/dt  = i chi alpha^2 - i Omega_d - (kappa_b/2) beta

have a trivial branch alpha = 0 and a finite-amplitude branch that splits
off at chi_c = kappa_a kappa_b / (8 Omega_d).  Linearizing the fluctuations
around either branch gives the steady quadrature variances below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .drive import DriveParameters
from .errors import ZeroDrive

BELOW = "below"
ABOVE = "above"
CRITICAL_WINDOW = 1e-9  # |chi/chi_c - 1| below which var_xa is reported as +inf
MARGINAL_FRACTION = 1e-9  # |max Re(lambda)| < this * kappa_a counts as marginal
JPA_THRESHOLD = 0.25


def critical_coupling(drive: DriveParameters) -> float:
    """chi_c = kappa_a kappa_b / (8 Omega_d), in rad/s."""
    if drive.rabi_frequency == 0:
        raise ZeroDrive("critical coupling is undefined for a vanishing drive")
    return drive.kappa_a * drive.kappa_b / (8.0 * drive.rabi_frequency)


def _coupling_ratio(chi: float, drive: DriveParameters) -> float:
    # chi / chi_c without dividing by Omega_d, so a zero drive maps to 0
    return 8.0 * chi * drive.rabi_frequency / (drive.kappa_a * drive.kappa_b)


@dataclass(frozen=True)
class SteadyStateSolution:
    branch: str
    alpha_s: float
    beta_s: complex
    chi_c: float
    var_xa_s: float = math.nan
    var_ya_s: float = math.nan
    var_xb_s: float = math.nan
    var_yb_s: float = math.nan
    stable: bool = False
    marginal: bool = False
    jacobian_eigen_real_max: float = math.nan


def branch_means(chi: float, drive: DriveParameters, branch: str) -> tuple[float, complex]:
    """(alpha_s, beta_s) on the requested branch, taking the + root for alpha_s."""
    if branch == BELOW:
        return 0.0, -2j * drive.rabi_frequency / drive.kappa_b
    if branch == ABOVE:
        if chi <= 0:
            raise ValueError("the above-threshold branch needs chi > 0")
        chi_c = critical_coupling(drive)
        # clamp the tiny negative argument at chi = chi_c
        alpha = math.sqrt(max(drive.rabi_frequency * (chi - chi_c), 0.0)) / chi
        return alpha, -1j * drive.kappa_a / (4.0 * chi)
    raise ValueError(f"unknown branch {branch!r}")


def mean_field_jacobian(chi: float, drive: DriveParameters, alpha: complex, beta: complex) -> np.ndarray:
    """Jacobian of the Kerr-free mean field in (Re a, Im a, Re b, Im b)."""
    x, y = alpha.real, alpha.imag
    u, v = beta.real, beta.imag
    ka, kb = drive.kappa_a, drive.kappa_b
    return np.array([
        [-2 * chi * v - ka / 2, 2 * chi * u, 2 * chi * y, -2 * chi * x],
        [2 * chi * u, 2 * chi * v - ka / 2, 2 * chi * x, 2 * chi * y],
        [-2 * chi * y, -2 * chi * x, -kb / 2, 0.0],
        [2 * chi * x, -2 * chi * y, 0.0, -kb / 2],
    ])


class Stability(NamedTuple):
    stable: bool
    max_real_eigenvalue: float
    marginal: bool


def linear_stability(chi: float, drive: DriveParameters, branch: str) -> Stability:
    """Eigenvalue test of the mean-field fixed point on ``branch``."""
    alpha, beta = branch_means(chi, drive, branch)
    eigenvalues = np.linalg.eigvals(mean_field_jacobian(chi, drive, complex(alpha), beta))
    worst = float(np.max(eigenvalues.real))
    marginal = abs(worst) <= MARGINAL_FRACTION * drive.kappa_a
    return Stability(stable=(worst < 0 and not marginal), max_real_eigenvalue=worst, marginal=marginal)


def physical_branch(chi: float, drive: DriveParameters) -> str:
    """Branch that is stable at ``chi``; the two coincide at chi_c."""
    return ABOVE if _coupling_ratio(chi, drive) > 1.0 else BELOW


def mean_field_branches(chi: float, drive: DriveParameters) -> SteadyStateSolution:
    """Means of the stable branch with its stability verdict."""
    if chi < 0:
        raise ValueError("chi must be >= 0")
    branch = physical_branch(chi, drive)
    alpha, beta = branch_means(chi, drive, branch)
    stability = linear_stability(chi, drive, branch)
    chi_c = critical_coupling(drive) if drive.rabi_frequency > 0 else math.inf
    return SteadyStateSolution(
        branch=branch, alpha_s=alpha, beta_s=beta, chi_c=chi_c,
        stable=stability.stable, marginal=stability.marginal,
        jacobian_eigen_real_max=stability.max_real_eigenvalue,
    )


def steady_variances_a(chi: float, drive: DriveParameters) -> tuple[float, float]:
    """(var_xa_s, var_ya_s); var_xa_s is +inf at the critical point."""
    ka, kb = drive.kappa_a, drive.kappa_b
    ratio = _coupling_ratio(chi, drive)
    if abs(ratio - 1.0) < CRITICAL_WINDOW:
        return math.inf, 0.5
    p = ka * kb
    x = 8.0 * chi * drive.rabi_frequency
    if ratio < 1.0:
        return p / (p - x), p / (p + x)
    var_xa = 1.0 + ka / kb + p / (2.0 * (x - p))
    var_ya = (2.0 * x * (ka + kb) - ka * kb**2) / (2.0 * x * (2.0 * ka + kb))
    return var_xa, var_ya


def steady_variances_b(chi: float, drive: DriveParameters) -> tuple[float, float]:
    """(var_xb_s, var_yb_s); the drive resonator is unsqueezed below threshold."""
    ka, kb = drive.kappa_a, drive.kappa_b
    if _coupling_ratio(chi, drive) <= 1.0:
        return 1.0, 1.0
    x = 8.0 * chi * drive.rabi_frequency
    return (x * (ka + kb) + ka**2 * kb) / (x * (2.0 * ka + kb)), (ka + kb) / kb


def steady_state(chi: float, drive: DriveParameters) -> SteadyStateSolution:
    means = mean_field_branches(chi, drive)
    var_xa, var_ya = steady_variances_a(chi, drive)
    var_xb, var_yb = steady_variances_b(chi, drive)
    return SteadyStateSolution(
        branch=means.branch, alpha_s=means.alpha_s, beta_s=means.beta_s, chi_c=means.chi_c,
        var_xa_s=var_xa, var_ya_s=var_ya, var_xb_s=var_xb, var_yb_s=var_yb,
        stable=means.stable, marginal=means.marginal,
        jacobian_eigen_real_max=means.jacobian_eigen_real_max,
    )


def jpa_baseline(rabi_frequency: float, kappa_a: float) -> tuple[float, bool]:
    """Steady (= minimal) var_ya of a flux-driven JPA and whether it is stable."""
    if rabi_frequency < 0 or kappa_a <= 0:
        raise ValueError("need rabi_frequency >= 0 and kappa_a > 0")
    return kappa_a / (kappa_a + 4.0 * rabi_frequency), rabi_frequency / kappa_a < JPA_THRESHOLD


def equivalent_jpa_ratio(chi_ratio: float) -> float:
    """Omega_JPA / kappa_a seen by CWR-A when the pump is the below-branch beta_s.

    The effective JPA drive is chi |beta_s| = 2 chi Omega_d / kappa_b, which is
    (chi/chi_c) kappa_a / 4.
    """
    return 0.25 * chi_ratio


STEADY_HEADER = ["chi_ratio", "|alpha_s|", "|beta_s|", "var_xa_s", "var_ya_s",
                 "var_xb_s", "var_yb_s", "stable"]
JPA_HEADER = ["jpa_omega_ratio", "jpa_var_ya", "jpa_stable"]


def steady_rows(chi_ratios, drive: DriveParameters, jpa: bool = False) -> tuple[list[str], list[list]]:
    """Steady-state table over chi/chi_c at fixed chi_c."""
    chi_c = critical_coupling(drive)
    rows = []
    for ratio in chi_ratios:
        s = steady_state(ratio * chi_c, drive)
        row = [float(ratio), abs(s.alpha_s), abs(s.beta_s), s.var_xa_s, s.var_ya_s,
               s.var_xb_s, s.var_yb_s, s.stable]
        if jpa:
            omega_ratio = equivalent_jpa_ratio(ratio)
            value, stable = jpa_baseline(omega_ratio * drive.kappa_a, drive.kappa_a)
            row += [omega_ratio, value, stable]
        rows.append(row)
    return STEADY_HEADER + (JPA_HEADER if jpa else []), rows
