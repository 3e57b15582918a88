"""Command-line front end: ``pdcsqueeze {modes,coupling-map,dynamics,steady}``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import output
from .config import RunConfiguration, load_config, parse_number_list
from .coupling import COUPLING_HEADER, compute_coupling, coupling_map, coupling_rows, flux_for_coupling
from .dynamics import (
    TRACE_HEADER,
    default_horizon,
    default_initial_state,
    default_sampling,
    integrate,
    require_resonant,
    trace_rows,
)
from .errors import ConfigError, DetunedCircuit, NumericalError, PDCSqueezeError, ZeroDrive
from .modes import MODE_TABLE_HEADER, mode_function_rows, mode_table_rows, solve_modes
from .steady import (
    JPA_HEADER,
    STEADY_HEADER,
    critical_coupling,
    equivalent_jpa_ratio,
    jpa_baseline,
    steady_rows,
    steady_state,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

SUMMARY_HEADER = ["chi_ratio", "kerr", "K/chi", "horizon [us]", "min_var_ya", "t_min [us]",
                  "final |alpha|", "final |beta|", "final var_ya", "max_dvar_ya", "error"]

logger = logging.getLogger("pdcsqueeze")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output file (directory for dynamics); stdout if omitted")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker processes for sweeps (default: logical cores)")
    common.add_argument("--allow-extreme-flux", action="store_true",
                        help="accept flux ratios in (0.49, 0.5)")
    common.add_argument("--verbose", action="store_true")

    parser = _Parser(prog="pdcsqueeze", description="Microwave squeezing in a SQUID-coupled two-resonator circuit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    modes = sub.add_parser("modes", parents=[common], help="wave vectors and mode constants")
    modes.add_argument("--mode-functions", metavar="PATH", help="also write sampled mode functions")

    sub.add_parser("coupling-map", parents=[common], help="chi and K over flux and SQUID position")

    dyn = sub.add_parser("dynamics", parents=[common], help="integrate the moment equations")
    dyn.add_argument("--chi-ratio", help="comma-separated chi/chi_c values")
    dyn.add_argument("--kerr", choices=("off", "on", "both"), default="off")

    steady = sub.add_parser("steady", parents=[common], help="closed-form steady states")
    steady.add_argument("--chi-ratio", help="comma-separated chi/chi_c values")
    steady.add_argument("--jpa", action="store_true", help="add the equivalent flux-driven JPA columns")
    steady.add_argument("--vary", choices=("chi", "drive"), default="chi",
                        help="realize chi/chi_c by varying chi (default) or the drive Omega_d")
    return parser


def _emit(args, header, rows) -> None:
    text = output.render(header, rows, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _chi_ratios(args, config: RunConfiguration) -> tuple[float, ...]:
    if getattr(args, "chi_ratio", None):
        ratios = parse_number_list("--chi-ratio", args.chi_ratio)
    elif config.chi_ratios is not None:
        ratios = config.chi_ratios
    elif "chi_ratio" in config.sweeps:
        ratios = tuple(float(r) for r in config.axis("chi_ratio"))
    else:
        raise ConfigError("no chi/chi_c values: pass --chi-ratio, set chi_ratio or sweep.chi_ratio")
    if any(not r > 0 for r in ratios):
        raise ConfigError("chi/chi_c values must be positive")
    return ratios


def cmd_modes(args, config: RunConfiguration) -> int:
    solutions = solve_modes(config.circuit, config.n_modes)
    _emit(args, MODE_TABLE_HEADER, mode_table_rows(solutions))
    if args.mode_functions:
        header, rows = mode_function_rows(solutions, config.mode_points)
        output.write_table(args.mode_functions, header, rows, args.format)
    return EXIT_OK


def cmd_coupling_map(args, config: RunConfiguration) -> int:
    flux = config.axis("flux_ratio")
    position = config.axis("squid_position")
    flux = [config.circuit.external_flux_ratio] if flux is None else flux
    position = [config.circuit.position_ratio] if position is None else position
    for x in position:
        if not abs(x) < 1:
            raise ConfigError(f"squid position ratio {x} must satisfy |x_J/l_a| < 1")
    cmap = coupling_map(config.circuit, flux, position, jobs=args.jobs)
    _emit(args, COUPLING_HEADER, coupling_rows(cmap))
    n_cells = len(flux) * len(position)
    if cmap.errors:
        logger.warning("%d of %d cells failed", len(cmap.errors), n_cells)
    return EXIT_NUMERICAL if len(cmap.errors) == n_cells else EXIT_OK


def _kerr_for_ratio(config: RunConfiguration, chi: float) -> float:
    """K at the flux bias where the configured circuit reaches ``chi``."""
    if config.kerr_ratio is not None:
        return config.kerr_ratio * chi
    try:
        flux = flux_for_coupling(config.circuit, chi)
    except ValueError as exc:
        raise ConfigError(f"cannot derive K from the circuit: {exc}") from None
    return compute_coupling(config.circuit.with_flux(flux)).kerr


def _run_trace(task):
    ratio, chi, kerr, drive, horizon, sampling = task
    try:
        trace = integrate(default_initial_state(), chi, kerr, drive, horizon, sampling)
    except NumericalError as exc:
        return None, f"{type(exc).__name__}: {exc}"
    return trace, None


def cmd_dynamics(args, config: RunConfiguration) -> int:
    if not args.out:
        raise ConfigError("dynamics writes several files; --out must name a directory")
    require_resonant(compute_coupling(config.circuit))
    ratios = _chi_ratios(args, config)
    drive = config.drive
    chi_c = critical_coupling(drive)
    horizons = config.axis("time_horizon")
    if horizons is None:
        horizons = [config.time_horizon or default_horizon(drive)]
    horizons = [float(h) for h in horizons]
    if any(not h > 0 for h in horizons):
        raise ConfigError("time horizons must be positive")
    labels = {"off": ["off"], "on": ["on"], "both": ["off", "on"]}[args.kerr]

    tasks, keys = [], []
    for horizon in horizons:
        sampling = config.sampling or default_sampling(horizon)
        for ratio in ratios:
            chi = ratio * chi_c
            kerr = _kerr_for_ratio(config, chi) if "on" in labels else 0.0
            for label in labels:
                tasks.append((ratio, chi, kerr if label == "on" else 0.0, drive, horizon, sampling))
                keys.append((horizon, ratio, label))
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(args.jobs, len(tasks))) as pool:
            results = list(pool.map(_run_trace, tasks))
    else:
        results = [_run_trace(t) for t in tasks]

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = "." + args.format
    traces = {}
    summary = []
    failures = 0
    for (horizon, ratio, label), task, (trace, error) in zip(keys, tasks, results):
        traces[(horizon, ratio, label)] = trace
        name = f"trace_chi{ratio:g}_kerr-{label}"
        if len(horizons) > 1:
            name += f"_T{horizon * 1e6:g}us"
        kerr_ratio = task[2] / task[1]
        if trace is None:
            failures += 1
            summary.append([ratio, label, kerr_ratio, horizon * 1e6] + [None] * 6 + [error])
            continue
        output.write_table(out_dir / (name + suffix), TRACE_HEADER, trace_rows(trace), args.format)
        partner = traces.get((horizon, ratio, "off")) if label == "on" else None
        deviation = None
        if partner is not None:
            deviation = float(abs(trace.var_ya - partner.var_ya).max())
        summary.append([
            ratio, label, kerr_ratio, horizon * 1e6, trace.min_var_ya,
            None if trace.t_min is None else trace.t_min * 1e6,
            float(trace.mean_abs_alpha[-1]), float(trace.mean_abs_beta[-1]), float(trace.var_ya[-1]),
            deviation, "",
        ])
    output.write_table(out_dir / ("summary" + suffix), SUMMARY_HEADER, summary, args.format)
    if failures:
        logger.error("%d of %d traces failed; see the summary error column", failures, len(tasks))
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_steady(args, config: RunConfiguration) -> int:
    drive = config.drive
    if "drive_strength" in config.sweeps:
        # Omega_d/2pi in MHz at fixed chi = chi_c of the configured drive
        strengths = 2.0 * math.pi * 1e6 * config.axis("drive_strength")
        if drive.rabi_frequency == 0:
            raise ZeroDrive("drive_strength sweeps are relative to a nonzero configured drive")
        ratios = tuple(float(s / drive.rabi_frequency) for s in strengths)
        vary = "drive"
    else:
        ratios = _chi_ratios(args, config)
        vary = args.vary
    if vary == "chi":
        header, rows = steady_rows(ratios, drive, jpa=args.jpa)
    else:
        header, rows = _steady_rows_varying_drive(ratios, drive, args.jpa)
    _emit(args, header, rows)
    return EXIT_OK


def _steady_rows_varying_drive(ratios, drive, jpa):
    """Hold chi at chi_c of the configured drive and scale Omega_d by each ratio."""
    chi = critical_coupling(drive)
    header = ["Omega_d/2pi [MHz]"] + STEADY_HEADER + (JPA_HEADER if jpa else [])
    rows = []
    for ratio in ratios:
        scaled = drive.with_rabi(ratio * drive.rabi_frequency)
        s = steady_state(chi, scaled)
        row = [scaled.rabi_frequency / (2.0 * math.pi * 1e6), float(ratio), abs(s.alpha_s), abs(s.beta_s),
               s.var_xa_s, s.var_ya_s, s.var_xb_s, s.var_yb_s, s.stable]
        if jpa:
            omega_ratio = equivalent_jpa_ratio(ratio)
            value, stable = jpa_baseline(omega_ratio * drive.kappa_a, drive.kappa_a)
            row += [omega_ratio, value, stable]
        rows.append(row)
    return header, rows


COMMANDS = {
    "modes": cmd_modes,
    "coupling-map": cmd_coupling_map,
    "dynamics": cmd_dynamics,
    "steady": cmd_steady,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        config = load_config(args.config, args.allow_extreme_flux)
        return COMMANDS[args.command](args, config)
    except (ConfigError, DetunedCircuit, ZeroDrive) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PDCSqueezeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
