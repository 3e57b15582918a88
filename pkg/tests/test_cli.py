import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pdcsqueeze import RootNotFound, cli
from pdcsqueeze.output import format_cell, parse_cell, render_csv


def run(tmp_path, args, config=None):
    argv = list(args)
    if config is not None:
        path = tmp_path / "run.cfg"
        path.write_text(config)
        argv += ["--config", str(path)]
    return cli.main(argv)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def column(header, rows, name):
    i = header.index(name)
    return [parse_cell(r[i]) for r in rows]


BARE = """
josephson_energy_GHz = 1e12   # rigid junction
charging_energy_GHz = 1e12    # vanishing junction capacitance
external_flux_ratio = 0
squid_position = 0
n_modes = 1
"""


def test_modes_reference(tmp_path):
    out = tmp_path / "modes.csv"
    assert run(tmp_path, ["modes", "--out", str(out), "--mode-functions", str(tmp_path / "mu.csv")]) == 0
    header, rows = read_csv(out)
    assert header == ["m", "k_m*l_a", "omega_m/2pi [GHz]", "B_m", "A_m", "Delta_m"]
    k = column(header, rows, "k_m*l_a")
    assert len(k) == 3 and k == sorted(k)
    mu_header, mu_rows = read_csv(tmp_path / "mu.csv")
    assert mu_header == ["x/l_a", "mu_1", "mu_2", "mu_3"] and len(mu_rows) == 201


def test_modes_bare_limit(tmp_path):
    out = tmp_path / "bare.csv"
    assert run(tmp_path, ["modes", "--out", str(out)], BARE) == 0
    header, rows = read_csv(out)
    assert column(header, rows, "k_m*l_a")[0] == pytest.approx(math.pi / 2, abs=1e-9)


def test_flux_out_of_range_exit_code(tmp_path, capsys):
    assert run(tmp_path, ["modes"], "external_flux_ratio = 0.6\n") == 1
    assert "flux ratio out of range" in capsys.readouterr().err


def test_extreme_flux_needs_override(tmp_path, capsys):
    assert run(tmp_path, ["modes"], "external_flux_ratio = 0.495\n") == 1
    assert "flux ratio out of range" in capsys.readouterr().err
    assert run(tmp_path, ["modes", "--allow-extreme-flux"], "external_flux_ratio = 0.495\n") == 0


@pytest.mark.parametrize("text", [
    "no_such_key = 1\n",
    "sweep.flux_ratio = 0.1 0.2 1\n",
    "sweep.temperature = 0 1 3\n",
    "half_length_a = -1\n",
    "kappa_a_MHz = abc\n",
    "squid_position = 0.001\nsquid_position_ratio = 0.2\n",
    "loop_length_GHz = 1\n",
])
def test_config_errors(tmp_path, text):
    assert run(tmp_path, ["modes"], text) == 1


def test_missing_config_file(tmp_path):
    assert cli.main(["modes", "--config", str(tmp_path / "absent.cfg")]) == 1


def test_bad_arguments_exit_code():
    with pytest.raises(SystemExit) as info:
        cli.main(["modes", "--format", "xml"])
    assert info.value.code == 1


def test_numerical_failure_exit_code(tmp_path, monkeypatch, capsys):
    def fail(*args, **kwargs):
        raise RootNotFound("found 0 of 3 roots in scan window k*l_a in (0, 9.42478]")

    monkeypatch.setattr(cli, "solve_modes", fail)
    assert run(tmp_path, ["modes"]) == 2
    assert "k*l_a in (0, 9.42478]" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("external_flux_ratio = 0.6\n")
    proc = subprocess.run([sys.executable, "-m", "pdcsqueeze", "modes", "--config", str(cfg)],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "flux ratio out of range" in proc.stderr


def test_coupling_map_single_cell(tmp_path):
    out = tmp_path / "cell.csv"
    assert run(tmp_path, ["coupling-map", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert len(rows) == 1
    assert column(header, rows, "chi/2pi [MHz]")[0] == pytest.approx(18.0, rel=0.20)


GRID = """
sweep.flux_ratio = 0.25 0.45 5
sweep.squid_position = 0.1 0.9 5
"""


def test_coupling_map_grid_and_determinism(tmp_path):
    outs = []
    for jobs in ("1", "3"):
        out = tmp_path / f"map{jobs}.csv"
        assert run(tmp_path, ["coupling-map", "--out", str(out), "--jobs", jobs], GRID) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    header, rows = read_csv(tmp_path / "map1.csv")
    chi = np.array(column(header, rows, "chi/2pi [MHz]")).reshape(5, 5)
    i, j = np.unravel_index(np.argmax(chi), chi.shape)
    assert i == 4 and j <= 2


def test_kerr_ratio_monotone_in_flux_row(tmp_path):
    out = tmp_path / "row.csv"
    text = "squid_position_ratio = 0.75\nsweep.flux_ratio = 0.25 0.45 6\n"
    assert run(tmp_path, ["coupling-map", "--out", str(out)], text) == 0
    header, rows = read_csv(out)
    ratios = column(header, rows, "K/chi")
    assert np.all(np.diff(ratios) > 0)


def test_coupling_map_all_cells_fail(tmp_path):
    text = "sweep.squid_position = 1.5 2.0 2\n"
    assert run(tmp_path, ["coupling-map"], text) == 1
    # every cell invalid but the grid itself well formed: numerical exit code
    text = "sweep.flux_ratio = 0.5 0.6 2\n"
    assert run(tmp_path, ["coupling-map", "--allow-extreme-flux"], text) == 1


def test_coupling_map_partial_failure(tmp_path, monkeypatch):
    from pdcsqueeze import coupling

    real = coupling.compute_coupling

    def flaky(params):
        if params.external_flux_ratio > 0.4:
            raise RootNotFound("no root")
        return real(params)

    monkeypatch.setattr(coupling, "compute_coupling", flaky)
    out = tmp_path / "partial.csv"
    text = "sweep.flux_ratio = 0.3 0.45 2\n"
    assert run(tmp_path, ["coupling-map", "--out", str(out), "--jobs", "1"], text) == 0
    header, rows = read_csv(out)
    assert rows[0][-1] == "" and "RootNotFound" in rows[1][-1]
    text = "sweep.flux_ratio = 0.42 0.45 2\n"
    assert run(tmp_path, ["coupling-map", "--jobs", "1"], text) == 2


def test_dynamics_outputs(tmp_path):
    out = tmp_path / "dyn"
    args = ["dynamics", "--out", str(out), "--chi-ratio", "0.3,1", "--kerr", "both"]
    assert run(tmp_path, args, "kerr_ratio = 0.013\n") == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["summary.csv", "trace_chi0.3_kerr-off.csv", "trace_chi0.3_kerr-on.csv",
                     "trace_chi1_kerr-off.csv", "trace_chi1_kerr-on.csv"]
    header, rows = read_csv(out / "trace_chi0.3_kerr-off.csv")
    assert header == ["t [us]", "|alpha|", "|beta|", "var_xa", "var_ya", "var_xb", "var_yb"]
    assert parse_cell(rows[-1][2]) == pytest.approx(0.3, abs=0.006)
    header, rows = read_csv(out / "summary.csv")
    at_threshold = [r for r in rows if r[0] == format_cell(1.0) and r[1] == "off"][0]
    min_var = parse_cell(at_threshold[header.index("min_var_ya")])
    assert min_var == pytest.approx(0.5, abs=0.005)
    assert min_var == parse_cell(at_threshold[header.index("final var_ya")])
    assert at_threshold[header.index("t_min [us]")] == ""
    paired = [r for r in rows if r[0] == format_cell(1.0) and r[1] == "on"][0]
    assert parse_cell(paired[header.index("max_dvar_ya")]) < 0.05


def test_dynamics_kerr_from_circuit(tmp_path):
    out = tmp_path / "dyn"
    assert run(tmp_path, ["dynamics", "--out", str(out), "--chi-ratio", "1", "--kerr", "on"],
               "squid_position_ratio = 0.75\n") == 0
    header, rows = read_csv(out / "summary.csv")
    assert parse_cell(rows[0][header.index("K/chi")]) == pytest.approx(0.013, rel=0.3)


def test_dynamics_requires_out_and_ratios(tmp_path):
    assert run(tmp_path, ["dynamics", "--chi-ratio", "1"]) == 1
    assert run(tmp_path, ["dynamics", "--out", str(tmp_path / "d")]) == 1


def test_dynamics_refuses_detuned_circuit(tmp_path, capsys):
    assert run(tmp_path, ["dynamics", "--out", str(tmp_path / "d"), "--chi-ratio", "1"],
               "half_length_b = 0.005\n") == 1
    assert "2 omega_a" in capsys.readouterr().err


def test_dynamics_horizon_sweep(tmp_path):
    out = tmp_path / "dyn"
    text = "sweep.time_horizon = 1e-6 2e-6 2\nsampling = 1e-8\n"
    assert run(tmp_path, ["dynamics", "--out", str(out), "--chi-ratio", "2", "--jobs", "2"], text) == 0
    assert (out / "trace_chi2_kerr-off_T1us.csv").exists() and (out / "trace_chi2_kerr-off_T2us.csv").exists()
    _, rows = read_csv(out / "trace_chi2_kerr-off_T1us.csv")
    assert len(rows) == 101


STEADY = "sweep.chi_ratio = 0.1 5 50\n"


def test_steady_sweep(tmp_path):
    out = tmp_path / "steady.csv"
    assert run(tmp_path, ["steady", "--out", str(out), "--jpa"], STEADY) == 0
    header, rows = read_csv(out)
    ratios = np.array(column(header, rows, "chi_ratio"))
    var_ya = np.array(column(header, rows, "var_ya_s"))
    k = int(np.argmin(var_ya))
    assert ratios[k] == pytest.approx(1.0) and var_ya[k] == pytest.approx(0.5, abs=1e-12)
    assert rows[k][header.index("var_xa_s")] == "inf"
    assert column(header, rows, "var_yb_s")[-1] == pytest.approx(11.0)
    assert header[-3:] == ["jpa_omega_ratio", "jpa_var_ya", "jpa_stable"]


def test_steady_vary_drive(tmp_path):
    out = tmp_path / "drive.csv"
    assert run(tmp_path, ["steady", "--out", str(out), "--chi-ratio", "0.5,2", "--vary", "drive"]) == 0
    header, rows = read_csv(out)
    assert header[0] == "Omega_d/2pi [MHz]"
    assert column(header, rows, "Omega_d/2pi [MHz]") == pytest.approx([0.015, 0.06])
    # variances depend only on chi/chi_c
    fixed = tmp_path / "chi.csv"
    run(tmp_path, ["steady", "--out", str(fixed), "--chi-ratio", "0.5,2"])
    h2, r2 = read_csv(fixed)
    assert column(header, rows, "var_ya_s") == pytest.approx(column(h2, r2, "var_ya_s"), rel=1e-12)


def test_steady_drive_strength_axis(tmp_path):
    out = tmp_path / "strength.csv"
    assert run(tmp_path, ["steady", "--out", str(out)], "sweep.drive_strength = 0.015 0.06 2\n") == 0
    header, rows = read_csv(out)
    assert column(header, rows, "chi_ratio") == pytest.approx([0.5, 2.0])


def test_steady_json(tmp_path):
    out = tmp_path / "steady.json"
    assert run(tmp_path, ["steady", "--out", str(out), "--format", "json", "--chi-ratio", "1,2"]) == 0
    data = json.loads(out.read_text())
    assert data["rows"][0]["var_xa_s"] == "inf"
    assert data["rows"][1]["var_yb_s"] == pytest.approx(11.0)


def test_csv_round_trip_precision(tmp_path):
    values = [math.pi, 1 / 3, 2.0 ** 0.5 * 1e-9, 6.02214076e23, 0.0, -1.5e-300]
    text = render_csv(["v"], [[v] for v in values])
    parsed = [parse_cell(r[0]) for r in list(csv.reader(io.StringIO(text)))[1:]]
    for original, back in zip(values, parsed):
        assert back == pytest.approx(original, rel=5e-12, abs=0)
    assert format_cell(math.inf) == "inf" and format_cell(None) == ""


def test_byte_identical_reruns(tmp_path):
    for command, extra in (("steady", ["--chi-ratio", "0.3,1,4"]), ("modes", [])):
        a, b = tmp_path / f"{command}_a.csv", tmp_path / f"{command}_b.csv"
        run(tmp_path, [command, "--out", str(a), *extra])
        run(tmp_path, [command, "--out", str(b), *extra])
        assert a.read_bytes() == b.read_bytes()
    da, db = tmp_path / "da", tmp_path / "db"
    run(tmp_path, ["dynamics", "--out", str(da), "--chi-ratio", "0.5,2", "--jobs", "1"])
    run(tmp_path, ["dynamics", "--out", str(db), "--chi-ratio", "0.5,2", "--jobs", "2"])
    for p in da.iterdir():
        assert p.read_bytes() == (db / p.name).read_bytes()
