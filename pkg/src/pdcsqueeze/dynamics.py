"""Mean fields and closed second-moment equations of the driven two-mode model.

State layout of the real vector handed to the integrator (length 20, Re/Im
interleaved, stable across versions):

    alpha, beta, A1, A2, A3, B1, B2, B3, C1, C2

with A1 = <da^2>, A2 = <da^dag da> + <da da^dag>, A3 = <da^dag^2>, the same
for mode b, C1 = <da db> and C2 = <da^dag db>.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .coupling import CouplingConstants
from .drive import DriveParameters, reference_drive  # noqa: F401
from .errors import DetunedCircuit, NonPhysical, ToleranceFailure
from .steady import critical_coupling, steady_variances_a

RTOL = 1e-9
ATOL = 1e-12
NEGATIVE_VARIANCE = -1e-6
IMAG_RESIDUE = 1e-9
PLATEAU = 1e-9  # a minimum this close to the final value is not a turning point
STATE_FIELDS = ("alpha", "beta", "A1", "A2", "A3", "B1", "B2", "B3", "C1", "C2")
VECTOR_SIZE = 2 * len(STATE_FIELDS)


@dataclass(frozen=True)
class MomentState:
    alpha: complex = 0j
    beta: complex = 0j
    A1: complex = 0j
    A2: complex = 1 + 0j
    A3: complex = 0j
    B1: complex = 0j
    B2: complex = 1 + 0j
    B3: complex = 0j
    C1: complex = 0j
    C2: complex = 0j

    def to_vector(self) -> np.ndarray:
        z = np.array(astuple(self), dtype=complex)
        out = np.empty(VECTOR_SIZE)
        out[0::2] = z.real
        out[1::2] = z.imag
        return out

    @classmethod
    def from_vector(cls, y) -> MomentState:
        y = np.asarray(y, dtype=float)
        if y.shape != (VECTOR_SIZE,):
            raise ValueError(f"expected a vector of length {VECTOR_SIZE}, got shape {y.shape}")
        return cls(*(complex(re, im) for re, im in zip(y[0::2], y[1::2])))

    @property
    def variances(self) -> tuple[float, float, float, float]:
        """(var_xa, var_ya, var_xb, var_yb)."""
        return (
            (self.A1 + self.A2 + self.A3).real,
            (self.A2 - self.A1 - self.A3).real,
            (self.B1 + self.B2 + self.B3).real,
            (self.B2 - self.B1 - self.B3).real,
        )


def default_initial_state() -> MomentState:
    """Weak coherent seeds alpha = 0.01, beta = 0.01i on top of vacuum noise."""
    return MomentState(alpha=0.01 + 0j, beta=0.01j)


def mean_field_rhs(alpha: complex, beta: complex, chi: float, kerr: float,
                   drive: DriveParameters) -> tuple[complex, complex]:
    n = abs(alpha) ** 2
    d_alpha = 2j * chi * alpha.conjugate() * beta + 2j * kerr * n * alpha - 0.5 * drive.kappa_a * alpha
    d_beta = 1j * chi * alpha * alpha - 1j * drive.rabi_frequency - 0.5 * drive.kappa_b * beta
    return d_alpha, d_beta


def _moment_derivatives(z, chi, kerr, omega_d, ka, kb, noise_a, noise_b):
    a, b, A1, A2, A3, B1, B2, B3, C1, C2 = z
    ac = a.conjugate()
    n = (a * ac).real
    g = 1j * chi * b + 1j * kerr * a * a
    gc = g.conjugate()
    rot = 4j * kerr * n

    da = 2j * chi * ac * b + 2j * kerr * n * a - 0.5 * ka * a
    db = 1j * chi * a * a - 1j * omega_d - 0.5 * kb * b

    def a1_rate(x1, c1):
        return 4j * chi * ac * c1 + 2.0 * g * A2 + 2.0 * (rot - 0.5 * ka) * x1

    def b1_rate(y1, c1):
        return 4j * chi * a * c1 - kb * y1

    # A3 and B3 are written as conjugates of the A1/B1 rates so that
    # A3 = conj(A1) and B3 = conj(B1) survive the integration bit for bit
    dA1 = a1_rate(A1, C1)
    dA3 = a1_rate(A3.conjugate(), C1).conjugate()
    t = 4j * chi * ac * C2 + 4.0 * g * A3
    dA2 = (t + t.conjugate()) - ka * A2 + noise_a
    dB1 = b1_rate(B1, C1)
    dB3 = b1_rate(B3.conjugate(), C1).conjugate()
    s = -4j * chi * ac * C2
    dB2 = (s + s.conjugate()) - kb * B2 + noise_b
    dC1 = 2j * chi * ac * B1 + 2j * chi * a * A1 + 2.0 * g * C2 + (rot - 0.5 * (ka + kb)) * C1
    dC2 = (-1j * chi * a * (B2 - 1.0) + 1j * chi * a * (A2 - 1.0) + 2.0 * gc * C1
           - (rot + 0.5 * (ka + kb)) * C2)
    return da, db, dA1, dA2, dA3, dB1, dB2, dB3, dC1, dC2


def moment_rhs(state: MomentState, chi: float, kerr: float, drive: DriveParameters) -> MomentState:
    """Time derivative of every mean and correlator."""
    d = _moment_derivatives(astuple(state), chi, kerr, drive.rabi_frequency, drive.kappa_a,
                            drive.kappa_b, drive.kappa_a * (2.0 * drive.thermal_na + 1.0),
                            drive.kappa_b * (2.0 * drive.thermal_nb + 1.0))
    return MomentState(*d)


def _vector_rhs(t, y, chi, kerr, omega_d, ka, kb, noise_a, noise_b):
    re = y[0::2].tolist()
    im = y[1::2].tolist()
    z = [complex(r, i) for r, i in zip(re, im)]
    d = _moment_derivatives(z, chi, kerr, omega_d, ka, kb, noise_a, noise_b)
    out = np.empty(VECTOR_SIZE)
    out[0::2] = [v.real for v in d]
    out[1::2] = [v.imag for v in d]
    return out


@dataclass
class VarianceTrace:
    times: np.ndarray  # s
    var_xa: np.ndarray
    var_ya: np.ndarray
    var_xb: np.ndarray
    var_yb: np.ndarray
    mean_abs_alpha: np.ndarray
    mean_abs_beta: np.ndarray
    min_var_ya: float
    t_min: float | None  # s
    moments: np.ndarray = field(repr=False)  # (n_samples, 10) complex


def refine_minimum(times: np.ndarray, values: np.ndarray) -> tuple[float, float | None]:
    """Sampled minimum refined by a parabola through its two neighbours.

    Returns (minimum, time); the time is None when the discrete minimum sits
    on either end of the grid or within PLATEAU of the final value.
    """
    i = int(np.argmin(values))
    vmin = float(values[i])
    if i == 0 or i == len(values) - 1 or values[-1] - vmin <= PLATEAU * max(1.0, abs(vmin)):
        return vmin, None
    t0, t1, t2 = times[i - 1], times[i], times[i + 1]
    y0, y1, y2 = values[i - 1], values[i], values[i + 1]
    h = t1 - t0
    curvature = y0 - 2.0 * y1 + y2
    if curvature <= 0 or abs(t2 - t1 - h) > 1e-9 * h:
        return vmin, float(t1)
    offset = 0.5 * h * (y0 - y2) / curvature
    return float(y1 - 0.125 * (y2 - y0) ** 2 / curvature), float(t1 + offset)


def integrate(initial: MomentState, chi: float, kerr: float, drive: DriveParameters,
              horizon: float, sampling: float, rtol: float = RTOL, atol: float = ATOL) -> VarianceTrace:
    """Integrate the moment equations and sample the variances on a uniform grid."""
    if not horizon > 0 or not sampling > 0:
        raise ValueError("horizon and sampling must be positive")
    n = max(int(round(horizon / sampling)), 1) + 1
    times = np.linspace(0.0, horizon, n)
    args = (chi, kerr, drive.rabi_frequency, drive.kappa_a, drive.kappa_b,
            drive.kappa_a * (2.0 * drive.thermal_na + 1.0),
            drive.kappa_b * (2.0 * drive.thermal_nb + 1.0))
    sol = solve_ivp(_vector_rhs, (0.0, horizon), initial.to_vector(), method="DOP853",
                    t_eval=times, rtol=rtol, atol=atol, args=args)
    if sol.status != 0:
        raise ToleranceFailure(f"integration stopped at t = {sol.t[-1] if sol.t.size else 0.0:.6g} s: "
                               f"{sol.message}")
    z = sol.y[0::2] + 1j * sol.y[1::2]
    alpha, beta, A1, A2, A3, B1, B2, B3, _, _ = z
    raw = {
        "var_xa": A1 + A2 + A3,
        "var_ya": A2 - A1 - A3,
        "var_xb": B1 + B2 + B3,
        "var_yb": B2 - B1 - B3,
    }
    variances = {}
    for name, values in raw.items():
        if not np.all(np.isfinite(values)):
            raise NonPhysical(f"{name} is not finite")
        residue = float(np.max(np.abs(values.imag)))
        if residue > IMAG_RESIDUE:
            raise NonPhysical(f"{name} has imaginary residue {residue:.3g}")
        real = values.real
        if real.min() < NEGATIVE_VARIANCE:
            raise NonPhysical(f"{name} drops to {real.min():.6g}")
        variances[name] = real
    min_var_ya, t_min = refine_minimum(times, variances["var_ya"])
    return VarianceTrace(
        times=times,
        mean_abs_alpha=np.abs(alpha),
        mean_abs_beta=np.abs(beta),
        min_var_ya=min_var_ya,
        t_min=t_min,
        moments=z.T.copy(),
        **variances,
    )


def default_horizon(drive: DriveParameters) -> float:
    return 8.0 / drive.kappa_b


def default_sampling(horizon: float) -> float:
    return horizon / 4000.0


def require_resonant(coupling: CouplingConstants) -> None:
    """The moment model is only valid on the 2:1 resonance."""
    if not coupling.is_resonant:
        raise DetunedCircuit(
            f"omega_b = {coupling.omega_b:.9g} rad/s is not 2 omega_a = {2 * coupling.omega_a:.9g} rad/s; "
            "use half_length_b = auto"
        )


@dataclass(frozen=True)
class ScanPoint:
    chi_ratio: float
    min_var_ya: float
    t_min: float | None
    trace: VarianceTrace | None = field(default=None, repr=False, compare=False)


def _scan_one(args):
    ratio, chi_c, kerr, drive, horizon, sampling = args
    trace = integrate(default_initial_state(), ratio * chi_c, kerr, drive, horizon, sampling)
    return ratio, trace


def minimum_variance_scan(chi_ratios: Sequence[float], drive: DriveParameters,
                          chi_c: float | None = None, kerr: float | Sequence[float] = 0.0,
                          horizon: float | None = None, sampling: float | None = None,
                          jobs: int = 1, keep_traces: bool = False) -> list[ScanPoint]:
    """Global minimum of var_ya and its time for each chi/chi_c.

    Where no turning point exists (var_ya still decreasing at the horizon),
    t_min is None; at or below threshold the minimum is then the closed-form
    steady value, which the trace only approaches asymptotically.
    """
    if any(r <= 0 for r in chi_ratios):
        raise ValueError("chi ratios must be positive")
    chi_c = critical_coupling(drive) if chi_c is None else chi_c
    horizon = default_horizon(drive) if horizon is None else horizon
    sampling = default_sampling(horizon) if sampling is None else sampling
    kerrs = [kerr] * len(chi_ratios) if np.isscalar(kerr) else list(kerr)
    if len(kerrs) != len(chi_ratios):
        raise ValueError("kerr must be a scalar or one value per ratio")
    tasks = [(float(r), chi_c, float(k), drive, horizon, sampling) for r, k in zip(chi_ratios, kerrs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_one, tasks))
    else:
        results = [_scan_one(t) for t in tasks]
    points = []
    for ratio, trace in results:
        value = trace.min_var_ya
        if trace.t_min is None and ratio <= 1.0:
            value = steady_variances_a(ratio * chi_c, drive)[1]
        points.append(ScanPoint(ratio, value, trace.t_min, trace if keep_traces else None))
    return points


@dataclass
class KerrComparison:
    without_kerr: VarianceTrace
    with_kerr: VarianceTrace
    max_abs_difference: float  # max |var_ya(K) - var_ya(0)| over the grid


def kerr_comparison(chi: float, kerr: float, drive: DriveParameters, horizon: float | None = None,
                    sampling: float | None = None) -> KerrComparison:
    horizon = default_horizon(drive) if horizon is None else horizon
    sampling = default_sampling(horizon) if sampling is None else sampling
    initial = default_initial_state()
    off = integrate(initial, chi, 0.0, drive, horizon, sampling)
    on = integrate(initial, chi, kerr, drive, horizon, sampling)
    return KerrComparison(off, on, float(np.max(np.abs(on.var_ya - off.var_ya))))


TRACE_HEADER = ["t [us]", "|alpha|", "|beta|", "var_xa", "var_ya", "var_xb", "var_yb"]
SCAN_HEADER = ["chi_ratio", "min_var_ya", "t_min [us]"]


def trace_rows(trace: VarianceTrace) -> list[list]:
    return [
        [float(t) * 1e6, float(a), float(b), float(xa), float(ya), float(xb), float(yb)]
        for t, a, b, xa, ya, xb, yb in zip(trace.times, trace.mean_abs_alpha, trace.mean_abs_beta,
                                           trace.var_xa, trace.var_ya, trace.var_xb, trace.var_yb)
    ]


def scan_rows(points: Sequence[ScanPoint]) -> list[list]:
    return [[p.chi_ratio, p.min_var_ya, None if p.t_min is None else p.t_min * 1e6] for p in points]

