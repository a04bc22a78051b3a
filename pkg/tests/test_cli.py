import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from penning_ict.classical import read_trajectory_csv
from penning_ict.cli import ConfigError, load_config, main
from penning_ict.numverify import GridField, integrate, read_field_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_frequencies_report(capsys):
    code, out, _ = run(capsys, "frequencies")
    assert code == 0
    report = json.loads(out)
    assert report["omega_c"] == 2.0
    assert report["omega_perp"] == pytest.approx(0.70711, abs=1e-5)
    assert report["omega_z"] == 1.0
    assert report["stable"] is True
    assert report["config"]["trap"] == {"mass": 1.0, "charge": 1.0, "B": 2.0, "D": 0.5, "hbar": 1.0}
    assert run(capsys, "frequencies")[1] == out


def test_untrapped_config_exits_2(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"trap": {"m": 1, "e": 1, "B": 1, "D": 1}}))
    for command in ("frequencies", "classical", "verify"):
        code, out, err = run(capsys, command, "--config", str(cfg))
        assert code == 2 and out == ""
        assert "untrapped" in err


def test_config_formats(tmp_path):
    kv = tmp_path / "trap.cfg"
    kv.write_text("# reference trap\nmass = 2\ncharge=1\nB = 3\nD = 0.5\ntraj = 1,0,0,0,1,0\nn = 2\n")
    config = load_config(str(kv))
    assert config.trap.mass == 2.0 and config.trap.B == 3.0 and config.n == 2
    assert config.traj == (1.0, 0.0, 0.0, 0.0, 1.0, 0.0)
    js = tmp_path / "trap.json"
    js.write_text(json.dumps({"mass": 2, "charge": 1, "B": 3, "D": 0.5, "samples": 7}))
    assert load_config(str(js), {"samples": 9}).samples == 9


@pytest.mark.parametrize("text", ["{not json", '{"trap": 3}', '{"colour": 1}', "mass 1\n", '{"traj": "1,2"}',
                                  '{"mass": -1}', '{"grid_points": 8}'])
def test_bad_config_rejected(tmp_path, capsys, text):
    cfg = tmp_path / "c"
    cfg.write_text(text)
    with pytest.raises(ConfigError):
        load_config(str(cfg))
    assert run(capsys, "frequencies", "--config", str(cfg))[0] == 2


def test_missing_config_file(capsys, tmp_path):
    assert run(capsys, "frequencies", "--config", str(tmp_path / "absent.json"))[0] == 2


def test_classical_csv(capsys, tmp_path):
    path = tmp_path / "orbit.csv"
    code, _, _ = run(capsys, "classical", "--traj", "0.8,-0.3,0.5,0.2,0.9,-0.4", "--t0", "0", "--t1", "40",
                     "--samples", "401", "--with-energy", "--out", str(path))
    assert code == 0
    assert path.read_text().splitlines()[0] == "t,x,y,z,px,py,pz,energy"
    times, states = read_trajectory_csv(path)
    np.testing.assert_array_equal(states[0], [0.8, -0.3, 0.5, 0.2, 0.9, -0.4])
    energy = np.genfromtxt(path, delimiter=",", names=True)["energy"]
    assert np.max(np.abs(energy / energy[0] - 1)) < 1e-12

    code, out, _ = run(capsys, "classical", "--t0", str(1 - 1e-9), "--t1", "1", "--samples", "2")
    rows = np.array([[float(v) for v in line.split(",")] for line in out.splitlines()[1:]])
    assert rows.shape == (2, 7) and np.max(np.abs(rows[0, 1:] - rows[1, 1:])) < 1e-8


@pytest.mark.parametrize("argv", [("--t0", "2", "--t1", "1"), ("--samples", "1")])
def test_classical_bad_range(capsys, argv):
    code, _, err = run(capsys, "classical", *argv)
    assert code == 2 and "error" in err


def test_eigenstate_grid_is_normalized(capsys, tmp_path):
    path = tmp_path / "ground.csv"
    assert run(capsys, "eigenstate", "--out", str(path))[0] == 0
    field = read_field_csv(path)
    assert integrate(GridField(field.spec, np.abs(field.values) ** 2)) == pytest.approx(1.0, abs=1e-6)


def test_eigenstate_rejects_bad_quantum_numbers(capsys):
    code, _, err = run(capsys, "eigenstate", "--l", "-1")
    assert code == 2 and "quantum numbers" in err


def test_ict_grid_is_shifted_eigenstate(capsys, tmp_path):
    eig, moved = tmp_path / "eig.csv", tmp_path / "ict.csv"
    common = ("--n", "1", "--l", "1", "--nz", "0", "--t", "2.5", "--grid-points", "32")
    assert run(capsys, "eigenstate", *common, "--out", str(eig))[0] == 0
    assert run(capsys, "ict", *common, "--traj", "1,0.5,-0.3,0.2,0.4,0.6", "--out", str(moved))[0] == 0
    a, b = read_field_csv(eig), read_field_csv(moved)
    assert a.spec.half_extent == b.spec.half_extent and a.spec.points_per_axis == b.spec.points_per_axis
    rho_a, rho_b = np.abs(a.values) ** 2, np.abs(b.values) ** 2
    assert np.max(np.abs(rho_a - rho_b)) < 1e-10 * rho_a.max()


def test_superposition_of_zero_orbit(capsys, tmp_path):
    ground, sup = tmp_path / "g.csv", tmp_path / "s.csv"
    assert run(capsys, "eigenstate", "--grid-points", "24", "--out", str(ground))[0] == 0
    assert run(capsys, "superposition", "--traj", "0,0,0,0,0,0", "--grid-points", "24", "--out", str(sup))[0] == 0
    g, s = read_field_csv(ground), read_field_csv(sup)
    np.testing.assert_allclose(np.abs(s.values) ** 2, 2 * np.abs(g.values) ** 2, rtol=1e-13, atol=1e-300)


def test_superposition_summary(capsys):
    code, out, _ = run(capsys, "superposition", "--traj", "0,0,0,0.7,0,0.5", "--summary", "--t0", "0.3", "--t1", "6",
                       "--samples", "4", "--grid-points", "48")
    assert code == 0
    report = json.loads(out)
    assert report["C_measured"] == pytest.approx(report["C_closed_form"], rel=1e-6)
    assert len(report["moment_table"]) == 4
    for row in report["moment_table"]:
        np.testing.assert_allclose(row["quadrature"], row["closed_form"], rtol=1e-5)
    code, _, err = run(capsys, "superposition", "--traj", "1,0,0,0.7,0,0.5", "--summary")
    assert code == 2 and "origin" in err


def test_fidelity_report(capsys):
    code, out, _ = run(capsys, "fidelity", "--traj", "1,0,0,0,0,0", "--traj2", "0,0,0,0,1,0", "--t", "3")
    assert code == 0
    report = json.loads(out)
    assert report["fidelity"] == pytest.approx(math.exp(-report["distance"] ** 2), rel=1e-12)
    assert report["fidelity_quadrature"] == pytest.approx(report["fidelity"], abs=1e-6)
    assert report["config"]["traj2"] == [0, 0, 0, 0, 1, 0]


def test_verify_report(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, _, _ = run(capsys, "verify", "fidelity", "--out", str(path))
    assert code == 0
    first = path.read_text()
    report = json.loads(first)
    assert report["all_pass"] and report["suite"] == "fidelity"
    for check in report["checks"]:
        assert set(check) == {"check_name", "points_tested", "max_residual", "tolerance", "comparison", "pass"}
    assert run(capsys, "verify", "fidelity", "--out", str(path))[0] == 0
    assert path.read_text() == first


def test_verify_fails_with_tight_tolerances(capsys):
    code, out, _ = run(capsys, "verify", "classical", "--tolerance-scale", "1e-20")
    assert code == 1
    assert not json.loads(out)["all_pass"]


def _module_run(env_threads, *argv):
    env = dict(os.environ, PENNING_THREADS=env_threads)
    return subprocess.run([sys.executable, "-m", "penning_ict.cli", *argv], capture_output=True, text=True, env=env)


def test_thread_cap_environment():
    assert _module_run("2", "frequencies").returncode == 0
    bad = _module_run("many", "frequencies")
    assert bad.returncode != 0 and "PENNING_THREADS" in bad.stderr
