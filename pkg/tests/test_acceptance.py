"""Acceptance criteria 1-10.

Criteria 1-9 are read off one run of ``penning-ict verify all`` on the
reference trap (m = e = hbar = 1, B = 2, D = 0.5) with the default 96-point
grids.  Criterion 10 checks the shape of an exported orbit.  Each test prints
one ``[PASS]`` or ``[FAIL]`` line before asserting.
"""

import json

import numpy as np
import pytest

from penning_ict.cli import main
from penning_ict.trapcore import TrapParameters, derive_frequencies


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    path = tmp_path_factory.mktemp("acceptance") / "verify.json"
    code = main(["verify", "all", "--out", str(path)])
    data = json.loads(path.read_text())
    data["exit_code"] = code
    data["by_name"] = {c["check_name"]: c for c in data["checks"]}
    return data


def announce(pytestconfig, number: int, title: str, passed: bool, details: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} ({details})"
    capture = pytestconfig.pluginmanager.getplugin("capturemanager")
    with capture.global_and_fixture_disabled():
        print("\n" + line)


def check_criterion(pytestconfig, report, number, title, names):
    checks = [report["by_name"][n] for n in names]
    details = "; ".join(
        f"{c['check_name']}={c['max_residual']:.3g} {c['comparison']} {c['tolerance']:.3g}" for c in checks
    )
    passed = all(c["pass"] for c in checks)
    announce(pytestconfig, number, title, passed, details)
    assert passed, details


def test_criterion_01_ict_theorem(pytestconfig, report):
    check_criterion(pytestconfig, report, 1, "injected states solve the Schroedinger equation",
                    ["ict.schrodinger_residual", "ict.corrupted_state_negative_control"])


def test_criterion_02_centroid_follows_orbit(pytestconfig, report):
    check_criterion(pytestconfig, report, 2, "centroid equals the classical orbit",
                    ["ict.ehrenfest_centroid_over_a_perp"])


def test_criterion_03_shape_rigidity(pytestconfig, report):
    check_criterion(pytestconfig, report, 3, "central moments up to order 4 are frozen",
                    ["ict.central_moments_upto_4_drift"])


def test_criterion_04_closed_form_vs_rk4(pytestconfig, report):
    check_criterion(pytestconfig, report, 4, "closed-form orbit vs RK4, 4th-order convergence",
                    ["classical.closed_form_vs_rk4", "classical.rk4_order_deviation_from_4"])


def test_criterion_05_conservation(pytestconfig, report):
    check_criterion(pytestconfig, report, 5, "H and Q conserved",
                    ["classical.energy_conservation", "classical.Q_conservation"])


def test_criterion_06_stationary_states(pytestconfig, report):
    check_criterion(pytestconfig, report, 6, "eigenfunction residual and orthonormality",
                    ["stationary.eigenfunction_residual", "stationary.orthonormality_upto_2"])


def test_criterion_07_continuity(pytestconfig, report):
    check_criterion(pytestconfig, report, 7, "continuity holds, fails without the drift term",
                    ["ict.continuity_residual", "ict.continuity_without_momentum_term_negative_control"])


def test_criterion_08_superposition(pytestconfig, report):
    check_criterion(pytestconfig, report, 8, "superposition variances and centroid prefactor",
                    ["superposition.moments_closed_form", "superposition.centroid_prefactor_spread"])


def test_criterion_09_fidelity_distance(pytestconfig, report):
    check_criterion(pytestconfig, report, 9, "fidelity and phase-space distance",
                    ["fidelity.analytic_vs_quadrature", "fidelity.time_independence",
                     "fidelity.distance_metric_properties"])


def test_full_battery_exit_code(report):
    failed = [c["check_name"] for c in report["checks"] if not c["pass"]]
    assert report["exit_code"] == 0 and not failed, failed


def test_criterion_10_epicyclic_orbit(pytestconfig, tmp_path):
    """The exported transverse orbit is the sum of two co-rotating circles and it loops."""
    path = tmp_path / "orbit.csv"
    assert main(["classical", "--traj", "1,0,0.5,0,0,0.3", "--t0", "0", "--t1", "60", "--samples", "3001",
                 "--out", str(path)]) == 0
    data = np.genfromtxt(path, delimiter=",", names=True)
    t, w = data["t"], data["x"] + 1j * data["y"]
    f = derive_frequencies(TrapParameters(1.0, 1.0, 2.0, 0.5))
    slow, fast = 0.5 * f.omega_c - f.omega_perp, 0.5 * f.omega_c + f.omega_perp
    basis = np.column_stack([np.exp(-1j * slow * t), np.exp(-1j * fast * t)])
    amps, *_ = np.linalg.lstsq(basis, w, rcond=None)
    misfit = np.max(np.abs(basis @ amps - w)) / np.max(np.abs(w))

    # a loop is a stretch of retrograde motion against the slow guiding-centre drift
    drift = -1j * slow * amps[0] * np.exp(-1j * slow * t)
    along = np.real(np.conj(drift) * np.gradient(w, t))
    reversals = int(np.sum(np.diff(np.sign(along)) != 0))
    both_circles = min(abs(amps[0]), abs(amps[1])) > 0.05 * max(abs(amps[0]), abs(amps[1]))
    passed = misfit < 1e-10 and both_circles and reversals >= 4
    announce(pytestconfig, 10, "epicyclic orbit", passed,
             f"two-circle misfit={misfit:.2g}, radii={abs(amps[0]):.3f}/{abs(amps[1]):.3f}, "
             f"retrograde reversals={reversals}; qualitative")
    assert passed
