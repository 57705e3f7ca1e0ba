import json

import numpy as np
import pytest

from conewave.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# bound states
# ---------------------------------------------------------------------------

def test_bound_states_direct_mapping(capsys):
    code, out, _ = run(capsys, "bound-states", "--rho", "1", "--lambda", "1",
                       "--zmax", "1.5", "--eta", "0", "--count", "3",
                       "--dimensionless")
    assert code == 0
    rows = [line.split("\t") for line in out.strip().splitlines()[1:]]
    cs = [float(r[1]) for r in rows]
    assert np.allclose(cs, (1.451, 2.946, 4.432), rtol=1e-3)
    assert "omega_hbar2_over_2m_rho2" in out    # units in the header


def test_bound_states_mev_units(capsys):
    code, out, _ = run(capsys, "bound-states", "--rho", "10", "--lambda",
                       "0.1", "--zmax", "20", "--count", "1")
    assert code == 0
    assert "omega_meV" in out
    omega = float(out.strip().splitlines()[1].split("\t")[2])
    assert omega == pytest.approx(12.713, rel=1e-3)   # GaAs default mass


def test_missing_required_is_usage_error(capsys):
    code, _, err = run(capsys, "bound-states", "--rho", "1")
    assert code == 2
    assert "--lambda" in err and "--zmax" in err


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------

def test_transport_fig6_style_run(capsys, tmp_path):
    out_file = tmp_path / "sweep.tsv"
    code, out, _ = run(capsys, "transport", "--R1", "40", "--R2", "2",
                       "--a", "10", "--eps", "2", "--Emin", "0.5",
                       "--Emax", "10", "--points", "3",
                       "--grid-points", "1000", "--out", str(out_file))
    assert code == 0
    body = out_file.read_text().splitlines()
    assert body[0] == "E_l_meV\tT\tR"
    vals = np.array([[float(v) for v in line.split("\t")]
                     for line in body[1:]])
    assert np.allclose(vals[:, 1] + vals[:, 2], 1.0, atol=1e-9)


def test_transport_rejects_eps_geq_a(capsys):
    code, _, err = run(capsys, "transport", "--R1", "40", "--R2", "2",
                       "--a", "10", "--eps", "12", "--Emin", "1",
                       "--Emax", "2")
    assert code == 2
    assert "smooth_len" in err


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

def test_geometry_junction(capsys):
    code, out, _ = run(capsys, "geometry", "--kind", "junction", "--R1", "40",
                       "--R2", "2", "--a", "10", "--eps", "2",
                       "--points", "5")
    assert code == 0
    header = out.splitlines()[0]
    assert "U_meV" in header and "g_thth_nm2" in header
    first = out.splitlines()[1].split("\t")
    assert float(first[1]) == pytest.approx(1600.0)


def test_geometry_unknown_kind(capsys):
    code, _, err = run(capsys, "geometry", "--kind", "cone")
    assert code == 2       # cone needs rho and lambda
    assert "--rho" in err


# ---------------------------------------------------------------------------
# config file
# ---------------------------------------------------------------------------

def test_config_file_supplies_parameters(capsys, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[bound-states]\nrho = 1\nlambda = 1\nzmax = 1.5\n"
                   "count = 2\ndimensionless = true\n")
    code, out, _ = run(capsys, "--config", str(cfg), "bound-states")
    assert code == 0
    assert len(out.strip().splitlines()) == 3    # header + 2 levels


def test_flags_override_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[bound-states]\nrho = 1\nlambda = 1\nzmax = 1.5\n"
                   "count = 3\ndimensionless = true\n")
    code, out, _ = run(capsys, "--config", str(cfg), "bound-states",
                       "--count", "1")
    assert code == 0
    assert len(out.strip().splitlines()) == 2


def test_config_unknown_key_rejected(capsys, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[bound-states]\nrho = 1\nlambda = 1\nzmax = 1.5\n"
                   "zmaxx = 2\n")
    code, _, err = run(capsys, "--config", str(cfg), "bound-states")
    assert code == 2
    assert "zmaxx" in err and "bound-states" in err


def test_config_type_mismatch_rejected(capsys, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[bound-states]\nrho = wide\nlambda = 1\nzmax = 1.5\n")
    code, _, err = run(capsys, "--config", str(cfg), "bound-states")
    assert code == 2
    assert "rho" in err


def test_config_file_missing(capsys):
    code, _, err = run(capsys, "--config", "/nonexistent.ini", "verify")
    assert code == 2
    assert "not found" in err


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["bound-states", "--bogus", "1"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

def test_experiment_subcommand(capsys, tmp_path):
    code, out, _ = run(capsys, "experiment", "table1", "--out",
                       str(tmp_path))
    assert code == 0
    assert "[PASS] table1:levels_aspect_1.5" in out
    assert any("wrote" in line for line in out.splitlines())


def test_experiment_set_override(capsys, tmp_path):
    code, out, _ = run(capsys, "experiment", "fig2_gp", "--out",
                       str(tmp_path), "--set", "points=11")
    assert code == 0


def test_experiment_bad_override(capsys, tmp_path):
    code, _, err = run(capsys, "experiment", "fig2_gp", "--out",
                       str(tmp_path), "--set", "nope=1")
    assert code == 2
    assert "nope" in err


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_list(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == 0
    assert "table1-eigenvalues" in out
    assert "unitarity" in out


def test_verify_single_criterion_with_report(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "--only", "table1-eigenvalues",
                       "--report", str(report))
    assert code == 0
    assert "[PASS] table1-eigenvalues" in out
    payload = json.loads(report.read_text())
    assert payload[0]["name"] == "table1-eigenvalues"
    assert payload[0]["passed"] is True


def test_verify_unknown_criterion(capsys):
    code, _, err = run(capsys, "verify", "--only", "nope")
    assert code == 2
    assert "unknown criteria" in err


def test_verify_coarse_grid_fails_with_diagnostic(capsys):
    # deliberately under-resolved transport grid: rejected with a clear
    # message and a failing exit status
    code, out, _ = run(capsys, "verify", "--only", "grid-convergence",
                       "--transport-grid-points", "50")
    assert code == 1
    assert "[FAIL] grid-convergence" in out
    assert "grid_points must be >= 500" in out
