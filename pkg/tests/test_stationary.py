import itertools
import math
import warnings

import numpy as np
import pytest

from penning_ict.ict import schrodinger_residual
from penning_ict.numverify import GridField, auto_grid, born_points, gram_matrix, integrate, sample
from penning_ict.specialfn import QuantumNumbers, laguerre_assoc
from penning_ict.stationary import (
    StationaryState,
    energy,
    eval_density_current,
    eval_eigenfunction,
    vector_potential,
)
from penning_ict.trapcore import TrapParameters


def test_ground_energy(trap, freqs):
    assert energy(QuantumNumbers(0, 0, 0), trap, freqs) == pytest.approx(math.sqrt(0.5) + 0.5, rel=1e-15)
    other = TrapParameters(2.0, 1.5, 3.0, 0.4, hbar=0.3)
    st = StationaryState.of(0, 0, 0, other)
    assert st.energy == pytest.approx(0.3 * (st.freqs.omega_perp + 0.5 * st.freqs.omega_z), rel=1e-15)


def test_angular_step_lowers_energy(trap, freqs):
    for n, l, nz in itertools.product(range(3), range(4), range(3)):  # noqa: E741
        step = energy(QuantumNumbers(n, l + 1, nz), trap, freqs) - energy(QuantumNumbers(n, l, nz), trap, freqs)
        assert step == pytest.approx(freqs.omega_perp - 0.5 * freqs.omega_c, rel=1e-12)
        assert step < 0


def test_ground_value_at_origin(trap):
    st = StationaryState.of(0, 0, 0, trap)
    assert eval_eigenfunction(st, np.zeros(3), 0.0) == pytest.approx(math.exp(st.log_norm), rel=1e-15)


def test_modulus_is_stationary(trap, rng):
    pts = rng.normal(size=(100, 3))
    for qn in [(0, 0, 0), (1, 2, 1), (2, 0, 3)]:
        st = StationaryState.of(*qn, trap)
        a0 = np.abs(st(pts, 0.0))
        for t in (0.7, 13.0, 250.0):
            assert np.max(np.abs(np.abs(st(pts, t)) - a0)) <= 1e-12 * a0.max()


def test_polar_form_matches_complex_power(trap, rng):
    pts = rng.normal(size=(50, 3))
    st = StationaryState.of(1, 3, 1, trap)
    st0 = StationaryState.of(1, 0, 1, trap)
    ratio = math.exp(st.log_norm - st0.log_norm)
    s = st.freqs.omega_perp * (pts[:, 0] ** 2 + pts[:, 1] ** 2)
    expected = ratio * st0(pts, 0.0) * (pts[:, 0] + 1j * pts[:, 1]) ** 3 \
        * laguerre_assoc(1, 3, s) / laguerre_assoc(1, 0, s)
    np.testing.assert_allclose(st(pts, 0.0), expected, rtol=1e-11)


def test_normalization_up_to_three(trap):
    worst = 0.0
    for qn in itertools.product(range(4), repeat=3):
        st = StationaryState.of(*qn, trap)
        grid = auto_grid(st, 0.0)
        worst = max(worst, abs(integrate(GridField(grid, np.abs(sample(st, grid, 0.0).values) ** 2)) - 1.0))
    assert worst < 1e-6


def test_power_of_two_tracks_axial_number(trap, freqs):
    """With 2^n in place of 2^nz the measured norm comes out as 2^(nz - n)."""
    m, hbar, w, wz = trap.mass, trap.hbar, freqs.omega_perp, freqs.omega_z
    for n, l, nz in [(2, 1, 0), (0, 1, 3), (1, 0, 2)]:  # noqa: E741
        st = StationaryState.of(n, l, nz, trap)
        grid = auto_grid(st, 0.0, points=64)
        unnormalized = integrate(GridField(grid, np.abs(sample(st, grid, 0.0).values) ** 2)) / math.exp(2 * st.log_norm)
        radial_power = (math.factorial(n) * (m / hbar) ** (l + 1.5) * w ** (l + 1) * wz**0.5
                        / (math.pi**1.5 * math.factorial(n + l) * math.factorial(nz)))
        assert radial_power / 2**nz * unnormalized == pytest.approx(1.0, rel=1e-8)
        assert radial_power / 2**n * unnormalized == pytest.approx(2.0 ** (nz - n), rel=1e-8)


def test_orthonormality_up_to_two(trap):
    states = [StationaryState.of(*qn, trap) for qn in itertools.product(range(3), repeat=3)]
    grid = auto_grid(StationaryState.of(2, 2, 2, trap), 0.0)
    gram = gram_matrix(states, grid, 0.37)
    assert np.max(np.abs(gram - np.eye(len(states)))) < 1e-6


@pytest.mark.parametrize("qn", list(itertools.product(range(3), repeat=3)))
def test_eigenfunction_residual(trap, qn, rng):
    st = StationaryState.of(*qn, trap)
    pts = born_points(st, 1.3, 50, rng)
    assert np.nanmax(schrodinger_residual(st, trap, pts, 1.3)) < 1e-5


def test_second_order_stencil_at_low_excitation(trap, rng):
    st = StationaryState.of(0, 1, 0, trap)
    pts = born_points(st, 0.0, 50, rng)
    assert np.nanmax(schrodinger_residual(st, trap, pts, 0.0, order=2)) < 1e-5
    with pytest.raises(ValueError):
        schrodinger_residual(st, trap, pts, 0.0, order=3)


def test_residual_flags_negligible_amplitude(trap):
    st = StationaryState.of(0, 0, 0, trap)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = schrodinger_residual(st, trap, np.array([[0.0, 0.0, 0.0], [40.0, 0.0, 0.0]]), 0.0)
    assert np.isfinite(res[0]) and np.isnan(res[1])
    assert any("negligible" in str(w.message) for w in caught)


def test_ground_current(trap, freqs, rng):
    st = StationaryState.of(0, 0, 0, trap)
    pts = rng.normal(size=(40, 3))
    rho, j = eval_density_current(st, pts)
    azimuthal = np.stack([-pts[:, 1], pts[:, 0], np.zeros(40)], axis=-1)
    np.testing.assert_allclose(j, -0.5 * freqs.omega_c * azimuthal * rho[:, None], rtol=1e-14, atol=1e-300)
    _, j0 = eval_density_current(st, np.zeros(3))
    assert np.all(j0 == 0)


def test_axis_has_no_axial_current(trap):
    pts = np.column_stack([np.zeros(9), np.zeros(9), np.linspace(-2, 2, 9)])
    for qn in [(0, 0, 1), (2, 0, 2), (1, 0, 0)]:
        _, j = eval_density_current(StationaryState.of(*qn, trap), pts)
        assert np.all(j[:, 2] == 0)


@pytest.mark.parametrize("qn", [(0, 1, 0), (1, 1, 1), (0, 2, 1)])
def test_current_matches_finite_difference(trap, qn, rng):
    st = StationaryState.of(*qn, trap)
    pts = rng.normal(size=(30, 3))
    h = 1e-5
    psi = st(pts, 0.0)
    grad = np.stack([(st(pts + h * e, 0.0) - st(pts - h * e, 0.0)) / (2 * h) for e in np.eye(3)], axis=-1)
    rho = np.abs(psi) ** 2
    fd = trap.hbar / trap.mass * np.imag(np.conj(psi)[:, None] * grad) \
        - trap.charge / trap.mass * vector_potential(pts, trap) * rho[:, None]
    _, j = eval_density_current(st, pts)
    assert np.max(np.abs(j - fd)) < 1e-8 * np.max(np.abs(j))
    radial = pts[:, 0] * j[:, 0] + pts[:, 1] * j[:, 1]
    assert np.max(np.abs(radial)) < 1e-14 and np.max(np.abs(j[:, 2])) < 1e-14


def test_density_is_azimuthally_symmetric(trap, rng):
    pts = rng.normal(size=(200, 3))
    for qn in [(0, 0, 0), (2, 1, 1), (1, 3, 2)]:
        st = StationaryState.of(*qn, trap)
        rho, _ = eval_density_current(st, pts)
        for angle in (0.4, 2.9):
            c, s = math.cos(angle), math.sin(angle)
            rot = pts @ np.array([[c, s, 0], [-s, c, 0], [0, 0, 1]])
            assert np.max(np.abs(eval_density_current(st, rot)[0] - rho)) <= 1e-12 * rho.max()


def test_support_and_log_norm_guard(trap, lengths):
    center, half, _ = StationaryState.of(0, 0, 0, trap).support()
    np.testing.assert_allclose(center, 0)
    np.testing.assert_allclose(half, [8 * lengths[0], 8 * lengths[0], 8 * lengths[1]], rtol=1e-15)
    with pytest.raises(ValueError, match="inconsistent"):
        StationaryState(QuantumNumbers(0, 0, 0), trap, log_norm=0.0)
