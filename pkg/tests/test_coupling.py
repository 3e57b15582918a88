import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdcsqueeze import (
    FluxOutOfRange,
    compute_coupling,
    coupling_map,
    coupling_strength,
    critical_coupling,
    derive,
    drive_flux_amplitude,
    flux_for_coupling,
    fundamental_mode,
    kerr_coefficient,
    reference_circuit,
    reference_drive,
)
from pdcsqueeze.coupling import COUPLING_HEADER, coupling_rows

TWO_PI = 2 * math.pi
# CODATA 2018, typed in independently of scipy.constants
HBAR = 1.054571817e-34
PHI0 = 2.067833848e-15
MU0 = 1.25663706212e-6


def _chi_by_hand(params, mode):
    d = derive(params)
    v = 1 / math.sqrt(params.capacitance_per_length * params.inductance_per_length)
    omega_a = mode.wavevector * v
    l_b = math.pi * v / (4 * omega_a)
    current = math.sqrt(HBAR * 2 * omega_a / (2 * params.inductance_per_length * l_b))
    phi_b = MU0 * params.loop_length / TWO_PI * current * math.log(3.0)
    l_j = (PHI0 / TWO_PI) ** 2 / (HBAR * params.josephson_energy * math.cos(math.pi * params.external_flux_ratio))
    return (math.tan(math.pi * params.external_flux_ratio) * phi_b / PHI0 * math.pi * mode.gap_amplitude**2
            / (4 * l_j * d.total_capacitance * omega_a))


def test_chi_matches_hand_evaluation(circuit):
    c = compute_coupling(circuit)
    assert c.chi == pytest.approx(_chi_by_hand(circuit, c.mode), rel=1e-8)


def test_chi_reference_magnitude(circuit):
    chi = compute_coupling(circuit).chi / TWO_PI
    assert chi == pytest.approx(18e6, rel=0.20)
    # well beyond the ~1 MHz decay rates
    assert chi > 10 * 1e6


def test_chi_vanishes_without_static_flux(circuit):
    assert compute_coupling(circuit.with_flux(0.0)).chi == 0.0


def test_chi_ordering_with_position():
    assert compute_coupling(reference_circuit(position_ratio=0.25)).chi > \
        compute_coupling(reference_circuit(position_ratio=0.75)).chi


def test_drive_flux_order_of_magnitude(circuit):
    c = compute_coupling(circuit)
    ratio = c.phi_b / PHI0
    assert 1e-4 < ratio < 1e-2


def test_log_factor_independent_of_loop_width(circuit):
    omega_b, l_b = 2 * TWO_PI * 3.5e9, 8e-3
    a = drive_flux_amplitude(circuit, omega_b, l_b)
    b = drive_flux_amplitude(replace(circuit, loop_width=37e-6, loop_offset=18.5e-6), omega_b, l_b)
    assert a == pytest.approx(b, rel=1e-14)


def test_drive_flux_linear_in_loop_length(circuit):
    omega_b, l_b = 2 * TWO_PI * 3.5e9, 8e-3
    a = drive_flux_amplitude(circuit, omega_b, l_b)
    b = drive_flux_amplitude(replace(circuit, loop_length=2 * circuit.loop_length), omega_b, l_b)
    assert b == pytest.approx(2 * a, rel=1e-14)


def test_resolved_drive_resonator(circuit):
    c = compute_coupling(circuit)
    v = derive(circuit).group_velocity
    assert math.pi * v / (2 * c.resolved_l_b) == pytest.approx(2 * c.omega_a, rel=1e-12)
    assert c.is_resonant and c.auto_resolved


def test_explicit_drive_resonator_is_detuned(circuit):
    c = compute_coupling(replace(circuit, half_length_b=5e-3))
    assert not c.is_resonant and not c.auto_resolved


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 3.0))
def test_chi_linear_in_drive_flux(scale):
    params = reference_circuit()
    mode = fundamental_mode(params)
    base = coupling_strength(params, mode, 1e-18)
    assert coupling_strength(params, mode, scale * 1e-18) == pytest.approx(scale * base, rel=1e-13)


def test_chi_linear_in_tan_at_fixed_mode(circuit):
    mode = fundamental_mode(circuit)
    a = coupling_strength(circuit.with_flux(0.3), mode, 1e-18)
    b = coupling_strength(circuit.with_flux(0.4), mode, 1e-18)
    # L_J moves with flux as 1/cos, so chi / (tan * cos) is flux independent
    ratio_a = a / (math.tan(0.3 * math.pi) * math.cos(0.3 * math.pi))
    ratio_b = b / (math.tan(0.4 * math.pi) * math.cos(0.4 * math.pi))
    assert ratio_a == pytest.approx(ratio_b, rel=1e-13)


def test_coupling_rejects_half_flux(circuit):
    with pytest.raises(FluxOutOfRange):
        compute_coupling(circuit.with_flux(0.5))


@pytest.mark.parametrize("f", [0.0, 0.2, 0.45, 0.49])
def test_kerr_positive(f):
    assert kerr_coefficient(reference_circuit(flux_ratio=f), fundamental_mode(reference_circuit(flux_ratio=f))) > 0


def test_kerr_by_hand(circuit):
    c = compute_coupling(circuit)
    d = derive(circuit)
    l_j = (PHI0 / TWO_PI) ** 2 / (HBAR * d.effective_josephson_energy)
    zpf = HBAR * c.mode.gap_amplitude**2 / (2 * d.total_capacitance * c.omega_a)
    # 6 from normal ordering (a + a^dag)^4 under the RWA
    expected = 6 * (1 / (24 * l_j)) * (TWO_PI / PHI0) ** 2 * zpf**2 / HBAR
    assert c.kerr == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("ratio,expected", [(0.3, 0.008), (1.0, 0.013), (4.0, 0.027)])
def test_kerr_ratio_in_strong_drive_setups(ratio, expected):
    params = reference_circuit(position_ratio=0.75)
    target = ratio * critical_coupling(reference_drive())
    c = compute_coupling(params.with_flux(flux_for_coupling(params, target)))
    assert c.chi == pytest.approx(target, rel=1e-9)
    assert c.kerr / c.chi == pytest.approx(expected, rel=0.30)


def test_kerr_ratio_monotone_in_flux():
    params = reference_circuit(position_ratio=0.75)
    ratios = [compute_coupling(params.with_flux(f)).kerr_ratio for f in np.linspace(0.25, 0.45, 9)]
    assert np.all(np.diff(ratios) > 0)


def test_kerr_ratio_decreases_with_position():
    ratios = [compute_coupling(reference_circuit(position_ratio=x)).kerr_ratio for x in (0.25, 0.5, 0.75)]
    assert ratios[0] > ratios[1] > ratios[2]


def test_map_matches_scalar_bitwise(circuit):
    cmap = coupling_map(circuit, [0.45], [0.25])
    assert cmap.chi[0, 0] == compute_coupling(circuit).chi


def test_map_zero_flux_row():
    cmap = coupling_map(reference_circuit(), [0.0, 0.3], np.linspace(0.1, 0.9, 5))
    assert np.all(cmap.chi[0] == 0.0)
    assert np.all(cmap.chi[1] > 0)


def test_map_records_cell_errors(circuit):
    cmap = coupling_map(circuit, [0.3, 0.6], [0.25])
    assert (1, 0) in cmap.errors and "flux ratio out of range" in cmap.errors[(1, 0)]
    assert np.isnan(cmap.chi[1, 0]) and np.isfinite(cmap.chi[0, 0])
    rows = coupling_rows(cmap)
    assert len(rows) == 2 and rows[1][2] is None and rows[1][-1]
    assert len(rows[0]) == len(COUPLING_HEADER)


def test_map_parallel_identical(circuit):
    grid = (np.linspace(0.25, 0.45, 4), np.linspace(0.1, 0.9, 4))
    serial = coupling_map(circuit, *grid, jobs=1)
    parallel = coupling_map(circuit, *grid, jobs=2)
    assert np.array_equal(serial.chi, parallel.chi)
    assert np.array_equal(serial.kerr, parallel.kerr)


def test_flux_for_coupling_unreachable(circuit):
    with pytest.raises(ValueError):
        flux_for_coupling(circuit, 1e12)
