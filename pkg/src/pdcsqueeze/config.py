"""Plain-text run configuration.

One ``key = value`` per line, ``#`` starts a comment.  Values are SI unless
the key carries a ``_GHz`` or ``_MHz`` suffix, in which case the number is
a frequency f and is stored as 2 pi f in rad/s.  Every key is optional;
missing circuit and drive fields fall back to the reference circuit and the
reference drive.  See README.md for the full key list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .circuit import CircuitParameters, check_flux, reference_circuit
from .drive import DriveParameters, reference_drive
from .errors import ConfigError

SWEEP_AXES = ("flux_ratio", "squid_position", "chi_ratio", "time_horizon", "drive_strength")
UNIT_SUFFIXES = {"_GHz": 2.0 * math.pi * 1e9, "_MHz": 2.0 * math.pi * 1e6}

CIRCUIT_KEYS = {
    "half_length_a", "capacitance_per_length", "inductance_per_length", "josephson_energy",
    "charging_energy", "squid_position", "squid_position_ratio", "external_flux_ratio",
    "loop_length", "loop_width", "loop_offset", "half_length_b",
}
DRIVE_KEYS = {"rabi_frequency", "kappa_a", "kappa_b", "kappa_b_ratio", "thermal_na", "thermal_nb"}
RUN_KEYS = {"n_modes", "mode_points", "chi_ratio", "kerr_ratio", "time_horizon", "sampling"}
FREQUENCY_KEYS = {"josephson_energy", "charging_energy", "rabi_frequency", "kappa_a", "kappa_b"}


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in SWEEP_AXES:
            raise ConfigError(f"unknown sweep axis {self.name!r}; expected one of {', '.join(SWEEP_AXES)}")
        if self.count < 2:
            raise ConfigError(f"sweep.{self.name}: count must be >= 2, got {self.count}")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"sweep.{self.name}: scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ConfigError(f"sweep.{self.name}: log scale needs positive end points")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class RunConfiguration:
    circuit: CircuitParameters = field(default_factory=reference_circuit)
    drive: DriveParameters = field(default_factory=reference_drive)
    sweeps: dict = field(default_factory=dict)  # axis name -> SweepAxis
    n_modes: int = 3
    mode_points: int = 201
    chi_ratios: tuple | None = None
    kerr_ratio: float | None = None
    time_horizon: float | None = None  # s
    sampling: float | None = None  # s
    deterministic: bool = True  # reserved; every run is deterministic

    def axis(self, name: str) -> np.ndarray | None:
        sweep = self.sweeps.get(name)
        return None if sweep is None else sweep.values()


def _number(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def _split_unit(key: str) -> tuple[str, float]:
    for suffix, scale in UNIT_SUFFIXES.items():
        if key.endswith(suffix):
            base = key[: -len(suffix)]
            if base not in FREQUENCY_KEYS:
                raise ConfigError(f"{key}: unit suffix only allowed on {', '.join(sorted(FREQUENCY_KEYS))}")
            return base, scale
    return key, 1.0


def _parse_sweep(name: str, key: str, text: str) -> SweepAxis:
    parts = text.split()
    if len(parts) not in (3, 4):
        raise ConfigError(f"{key}: expected 'start stop count [linear|log]', got {text!r}")
    count = _number(key, parts[2])
    if count != int(count):
        raise ConfigError(f"{key}: count must be an integer")
    return SweepAxis(name, _number(key, parts[0]), _number(key, parts[1]), int(count),
                     parts[3] if len(parts) == 4 else "linear")


def parse_number_list(key: str, text: str) -> tuple[float, ...]:
    items = [item for item in text.replace(",", " ").split() if item]
    if not items:
        raise ConfigError(f"{key}: empty list")
    return tuple(_number(key, item) for item in items)


def parse_config(text: str, allow_extreme_flux: bool = False) -> RunConfiguration:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    circuit_fields: dict = {}
    drive_fields: dict = {}
    run: dict = {}
    sweeps: dict = {}
    position_ratio = None
    kappa_b_ratio = None
    for key, value in raw.items():
        if key.startswith("sweep."):
            name = key[len("sweep."):]
            sweeps[name] = _parse_sweep(name, key, value)
            continue
        base, scale = _split_unit(key)
        if base == "half_length_b":
            circuit_fields[base] = None if value.lower() == "auto" else _number(key, value)
        elif base == "squid_position_ratio":
            position_ratio = _number(key, value)
        elif base in CIRCUIT_KEYS:
            circuit_fields[base] = _number(key, value) * scale
        elif base == "kappa_b_ratio":
            kappa_b_ratio = _number(key, value)
        elif base in DRIVE_KEYS:
            drive_fields[base] = _number(key, value) * scale
        elif base in ("n_modes", "mode_points"):
            number = _number(key, value)
            if number != int(number) or number < 1:
                raise ConfigError(f"{key}: expected a positive integer")
            run[base] = int(number)
        elif base == "chi_ratio":
            run["chi_ratios"] = parse_number_list(key, value)
        elif base in ("kerr_ratio", "time_horizon", "sampling"):
            run[base] = _number(key, value)
        else:
            raise ConfigError(f"unknown configuration key {key!r}")

    if "squid_position" in circuit_fields and position_ratio is not None:
        raise ConfigError("give either squid_position or squid_position_ratio, not both")
    base = reference_circuit()
    try:
        circuit = replace(base, **circuit_fields)
        if position_ratio is not None:
            circuit = circuit.with_position_ratio(position_ratio)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    check_flux(circuit.external_flux_ratio, allow_extreme_flux)
    flux_sweep = sweeps.get("flux_ratio")
    if flux_sweep is not None:
        for f in flux_sweep.values():
            check_flux(float(f), allow_extreme_flux)

    if "kappa_b" in drive_fields and kappa_b_ratio is not None:
        raise ConfigError("give either kappa_b or kappa_b_ratio, not both")
    drive = replace(reference_drive(), **drive_fields)
    if kappa_b_ratio is not None:
        drive = replace(drive, kappa_b=kappa_b_ratio * drive.kappa_a)

    for key in ("time_horizon", "sampling"):
        if key in run and not run[key] > 0:
            raise ConfigError(f"{key} must be positive")
    return RunConfiguration(circuit=circuit, drive=drive, sweeps=sweeps, **run)


def load_config(path: str | Path | None, allow_extreme_flux: bool = False) -> RunConfiguration:
    if path is None:
        return parse_config("", allow_extreme_flux)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, allow_extreme_flux)
