"""Verification battery behind ``penning-ict verify``.

Every check returns a report entry::

    {"check_name", "points_tested", "max_residual", "tolerance", "comparison", "pass"}

``comparison`` is ``"<"`` for ordinary bounds and ``">"`` for negative
controls, which pass when the detector fires.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .classical import (
    Trajectory,
    canonical_rhs,
    evaluate_trajectory,
    hamiltonian_value,
    integrate_oracle,
    quadratic_form_Q,
)
from .ict import (
    IctState,
    continuity_residual,
    eval_ict,
    schrodinger_residual,
)
from .numverify import GridField, GridSpec, auto_grid, born_points, gram_matrix, integrate, sample
from .stationary import StationaryState, eval_density_current
from .superfid import (
    SpecialTrajectoryParams,
    SuperpositionState,
    eval_ground_ict,
    fidelity_analytic,
    fidelity_numeric,
    measure_centroid_prefactor,
    superposition_central_moments,
    superposition_moments_closed_form,
    superposition_norm,
    trajectory_distance,
)
from .trapcore import PhaseSpacePoint, TrapParameters, characteristic_lengths, derive_frequencies

__all__ = ["VerifySettings", "SUITES", "run_suite", "random_trajectory", "ict_theorem_states"]

SUITES = ("classical", "stationary", "ict", "superposition", "fidelity")


@dataclass(frozen=True)
class VerifySettings:
    seed: int = 20240101
    grid_points: int = 96
    sigma_multiple: float = 8.0
    tolerance_scale: float = 1.0


def _entry(name: str, points: int, residual: float, tolerance: float, negative: bool = False) -> dict:
    residual = float(residual)
    passed = residual > tolerance if negative else residual < tolerance
    return {
        "check_name": name,
        "points_tested": int(points),
        "max_residual": residual,
        "tolerance": float(tolerance),
        "comparison": ">" if negative else "<",
        "pass": bool(passed and math.isfinite(residual)),
    }


def random_trajectory(params: TrapParameters, rng: np.random.Generator, scale: float = 1.0) -> Trajectory:
    """Orbit with initial offsets of order ``scale`` widths and momenta of order ``scale hbar / width``."""
    f = derive_frequencies(params)
    a_perp, a_z = characteristic_lengths(params, f)
    widths = np.array([a_perp, a_perp, a_z])
    x0 = rng.normal(size=3) * widths * scale
    p0 = rng.normal(size=3) * params.hbar / widths * scale
    return Trajectory(PhaseSpacePoint.from_array(np.concatenate([x0, p0])), params)


def ict_theorem_states() -> list[tuple[int, int, int]]:
    return [qn for qn in itertools.product(range(3), repeat=3) if sum(qn) <= 3]


class _Suite:
    def __init__(self, params: TrapParameters, settings: VerifySettings):
        self.params = params
        self.settings = settings
        self.freqs = derive_frequencies(params)
        self.a_perp, self.a_z = characteristic_lengths(params, self.freqs)
        self.rng = np.random.default_rng(settings.seed)

    def tol(self, value: float) -> float:
        return value * self.settings.tolerance_scale

    def grid(self, state, t: float) -> GridSpec:
        return auto_grid(state, t, self.settings.sigma_multiple, self.settings.grid_points)

    # ----------------------------------------------------------------- classical

    def classical(self) -> list[dict]:
        p, f = self.params, self.freqs
        trajs = [random_trajectory(p, self.rng, scale=2.0) for _ in range(5)]
        out = []

        initials = np.array([tr.initial.as_array() for tr in trajs])
        rk4 = integrate_oracle(initials, p, 10.0, 1e-4)
        closed = np.array([tr.phase_space(10.0) for tr in trajs])
        out.append(_entry("classical.closed_form_vs_rk4", initials.size, np.max(np.abs(rk4 - closed)), self.tol(1e-8)))

        errors = []
        for fraction in (0.08, 0.04, 0.02):
            step = fraction / max(f.omega_c, f.omega_perp, f.omega_z)
            errors.append(np.max(np.abs(integrate_oracle(initials, p, 10.0, step) - closed)))
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        out.append(_entry("classical.rk4_order_deviation_from_4", len(errors), np.max(np.abs(orders - 4.0)), 0.25))

        h = 1e-5
        ts = self.rng.uniform(0.0, 50.0, size=100)
        worst = 0.0
        for tr in trajs:
            scale = np.max(np.abs(tr.initial.as_array())) * max(f.omega_c, f.omega_z, 1.0)
            for t in ts:
                fd = (tr.phase_space(t + h) - tr.phase_space(t - h)) / (2 * h)
                rhs = canonical_rhs(evaluate_trajectory(tr, t), p, f).as_array()
                worst = max(worst, np.max(np.abs(fd - rhs)) / scale)
        out.append(_entry("classical.canonical_equations_fd", len(ts) * len(trajs), worst, self.tol(1e-6)))

        period = 2 * math.pi / min(f.omega_perp, f.omega_z)
        ts = np.linspace(0.0, 100 * period, 2001)
        drift_h = drift_q = 0.0
        for tr in trajs:
            states = tr.phase_space(ts)
            energy = hamiltonian_value(states, p, f)
            q = quadratic_form_Q(states, p, f)
            drift_h = max(drift_h, np.max(np.abs(energy - energy[0])) / abs(energy[0]))
            drift_q = max(drift_q, np.max(np.abs(q - q[0])) / q[0])
        out.append(_entry("classical.energy_conservation", ts.size * len(trajs), drift_h, self.tol(1e-12)))
        out.append(_entry("classical.Q_conservation", ts.size * len(trajs), drift_q, self.tol(1e-12)))

        t1, t2 = 3.7, 11.2
        worst = 0.0
        for tr in trajs:
            mid = Trajectory(evaluate_trajectory(tr, t1), p, f)
            worst = max(worst, np.max(np.abs(mid.phase_space(t2) - tr.phase_space(t1 + t2))))
        out.append(_entry("classical.time_composition", len(trajs), worst, self.tol(1e-12)))

        a, b = 0.7, -1.9
        combo = Trajectory(PhaseSpacePoint.from_array(a * trajs[0].initial.as_array() + b * trajs[1].initial.as_array()), p, f)
        ts = np.linspace(0, 40, 50)
        lin = np.max(np.abs(combo.phase_space(ts) - a * trajs[0].phase_space(ts) - b * trajs[1].phase_space(ts)))
        out.append(_entry("classical.linearity", ts.size, lin, self.tol(1e-12)))
        return out

    # ---------------------------------------------------------------- stationary

    def stationary(self) -> list[dict]:
        p = self.params
        out = []
        states = [StationaryState.of(*qn, p) for qn in itertools.product(range(3), repeat=3)]

        worst, count = 0.0, 0
        for st in states:
            t = float(self.rng.uniform(0, 10))
            pts = born_points(st, t, 50, self.rng)
            worst = max(worst, np.nanmax(schrodinger_residual(st, p, pts, t)))
            count += len(pts)
        out.append(_entry("stationary.eigenfunction_residual", count, worst, self.tol(1e-5)))

        norm_err = 0.0
        triples = list(itertools.product(range(4), repeat=3))
        for qn in triples:
            st = StationaryState.of(*qn, p)
            rho = np.abs(sample(st, self.grid(st, 0.0), 0.0).values) ** 2
            norm_err = max(norm_err, abs(integrate(GridField(self.grid(st, 0.0), rho)) - 1.0))
        out.append(_entry("stationary.normalization_upto_3", len(triples), norm_err, self.tol(1e-6)))

        big = StationaryState.of(2, 2, 2, p)
        gram = gram_matrix(states, self.grid(big, 0.0), 0.37)
        out.append(_entry("stationary.orthonormality_upto_2", gram.size, np.max(np.abs(gram - np.eye(len(states)))),
                          self.tol(1e-6)))

        pts = self.rng.normal(size=(200, 3)) * [self.a_perp, self.a_perp, self.a_z]
        worst = 0.0
        for st in states:
            rho, _ = eval_density_current(st, pts)
            for angle in (0.3, 1.7, 4.1):
                c, s = math.cos(angle), math.sin(angle)
                rot = pts @ np.array([[c, s, 0], [-s, c, 0], [0, 0, 1]])
                rho_rot, _ = eval_density_current(st, rot)
                worst = max(worst, np.max(np.abs(rho_rot - rho)) / np.max(rho))
        out.append(_entry("stationary.azimuthal_symmetry", len(states) * 3 * len(pts), worst, self.tol(1e-12)))

        worst = 0.0
        for st in states:
            a0 = np.abs(st(pts, 0.0))
            for t in (1.3, 27.0, 400.0):
                worst = max(worst, np.max(np.abs(np.abs(st(pts, t)) - a0)) / np.max(a0))
        out.append(_entry("stationary.stationarity", len(states) * 3 * len(pts), worst, self.tol(1e-12)))
        return out

    # ----------------------------------------------------------------------- ict

    def ict(self) -> list[dict]:
        p = self.params
        out = []

        worst, worst_neg, count = 0.0, np.inf, 0
        for qn in ict_theorem_states():
            base = StationaryState.of(*qn, p)
            for _ in range(5):
                state = IctState(base, random_trajectory(p, self.rng))
                t = float(self.rng.uniform(0, 20 / self.freqs.omega_z))
                pts = born_points(state, t, 50, self.rng)
                worst = max(worst, np.nanmax(schrodinger_residual(state, p, pts, t)))
                count += len(pts)

                def corrupted(r, tt, state=state):
                    return state(r, tt) * (1 + 0.01 * np.asarray(r)[..., 0] / self.a_perp)

                neg = np.nanmax(schrodinger_residual(corrupted, p, pts, t, energy_scale=state.energy_scale))
                worst_neg = min(worst_neg, neg)
        out.append(_entry("ict.schrodinger_residual", count, worst, self.tol(1e-5)))
        out.append(_entry("ict.corrupted_state_negative_control", count // 50, worst_neg, 1e-3, negative=True))

        ground = StationaryState.of(0, 0, 0, p)
        worst = 0.0
        for _ in range(5):
            tr = random_trajectory(p, self.rng)
            pts = born_points(IctState(ground, tr), 0.0, 20, self.rng)
            for t in self.rng.uniform(0, 20, size=20):
                worst = max(worst, np.max(np.abs(eval_ict(IctState(ground, tr), pts, t) - eval_ground_ict(tr, p, pts, t))
                                          / np.max(np.abs(eval_ground_ict(tr, p, pts, t)))))
        out.append(_entry("ict.ground_closed_form_cross_check", 5 * 20 * 20, worst, self.tol(1e-12)))

        times = np.linspace(0.0, 4 * 2 * math.pi / self.freqs.omega_z, 20)
        centroid_err = norm_err = moment_drift = 0.0
        orders = [o for o in itertools.product(range(5), repeat=3) if sum(o) <= 4]
        n_states = 0
        for qn in [(0, 0, 0), (1, 1, 1), (0, 2, 1)]:
            base = StationaryState.of(*qn, p)
            state = IctState(base, random_trajectory(p, self.rng, scale=1.5))
            n_states += 1
            # fixed box around the whole orbit, so the packet moves across the grid
            reach = np.max(np.abs(state.trajectory.position(np.linspace(0, times[-1], 400))), axis=0)
            _, half, _ = base.support(0.0, self.settings.sigma_multiple)
            fixed = GridSpec((0.0, 0.0, 0.0), tuple(half + reach), (self.settings.grid_points,) * 3)
            reference = None
            for t in times:
                rho = GridField(fixed, np.abs(sample(state, fixed, t).values) ** 2)
                pos = fixed.positions()
                rt = state.trajectory.position(t)
                norm_err = max(norm_err, abs(integrate(rho, decay_tol=1e-10) - 1.0))
                c = np.array([integrate(rho, pos[..., k], decay_tol=1e-10) for k in range(3)])
                centroid_err = max(centroid_err, np.max(np.abs(c - rt)) / self.a_perp)
                d = pos - rt
                moments = np.array([integrate(rho, d[..., 0] ** i * d[..., 1] ** j * d[..., 2] ** k, decay_tol=1e-8)
                                    for i, j, k in orders])
                if reference is None:
                    reference = moments
                    scale = np.array([max(abs(m), self.a_perp ** (i + j) * self.a_z ** k)
                                      for m, (i, j, k) in zip(moments, orders)])
                moment_drift = max(moment_drift, np.max(np.abs(moments - reference) / scale))
        out.append(_entry("ict.unitarity", n_states * len(times), norm_err, self.tol(1e-6)))
        out.append(_entry("ict.ehrenfest_centroid_over_a_perp", n_states * len(times), centroid_err, self.tol(1e-6)))
        out.append(_entry("ict.central_moments_upto_4_drift", n_states * len(times) * len(orders), moment_drift,
                          self.tol(1e-6)))

        worst, worst_neg, count = 0.0, np.inf, 0
        for qn in [(0, 0, 0), (1, 1, 1), (2, 0, 1), (0, 3, 0)]:
            base = StationaryState.of(*qn, p)
            state = IctState(base, random_trajectory(p, self.rng))
            t = float(self.rng.uniform(0, 10))
            pts = born_points(state, t, 50, self.rng)
            worst = max(worst, np.max(continuity_residual(state, pts, t)))
            worst_neg = min(worst_neg, np.max(continuity_residual(state, pts, t, momentum_term=False)))
            count += len(pts)
        out.append(_entry("ict.continuity_residual", count, worst, self.tol(1e-5)))
        out.append(_entry("ict.continuity_without_momentum_term_negative_control", 4, worst_neg, 1e-2, negative=True))
        return out

    # ------------------------------------------------------------- superposition

    def superposition(self) -> list[dict]:
        p = self.params
        out = []
        moment_err = spread = 0.0
        ts = np.linspace(0.0, 10.0, 10)
        for lp, lz in itertools.product((0.4, 2.0), repeat=2):
            stp = SpecialTrajectoryParams.from_amplitudes(lp * self.a_perp, lz * self.a_z, p)
            state = SuperpositionState.from_trajectory(stp.trajectory(p))
            for t in ts:
                num = superposition_central_moments(state, t, self.grid(state, t))
                moment_err = max(moment_err, np.max(np.abs(num / superposition_moments_closed_form(p, stp, t) - 1)))
            ratios = measure_centroid_prefactor(state, stp, np.linspace(0.35, 9.6, 10))
            values = ratios[np.isfinite(ratios)]
            spread = max(spread, (values.max() - values.min()) / abs(np.mean(values)))
        out.append(_entry("superposition.moments_closed_form", 4 * len(ts), moment_err, self.tol(1e-5)))
        out.append(_entry("superposition.centroid_prefactor_spread", 4 * 10, spread, self.tol(1e-4)))

        stp = SpecialTrajectoryParams.from_amplitudes(self.a_perp, self.a_z, p)
        state = SuperpositionState.from_trajectory(stp.trajectory(p))
        norms = np.array([superposition_norm(state, t, self.grid(state, t)) for t in np.linspace(0, 10, 6)])
        out.append(_entry("superposition.norm_constancy", norms.size, np.max(np.abs(norms / norms[0] - 1)),
                          self.tol(1e-8)))

        worst, count = 0.0, 0
        for _ in range(3):
            sup = SuperpositionState.from_trajectory(random_trajectory(p, self.rng))
            t = float(self.rng.uniform(0, 10))
            pts = born_points(sup, t, 50, self.rng)
            worst = max(worst, np.nanmax(schrodinger_residual(sup, p, pts, t)))
            count += len(pts)
        out.append(_entry("superposition.schrodinger_residual", count, worst, self.tol(1e-5)))
        return out

    # ------------------------------------------------------------------ fidelity

    def fidelity(self) -> list[dict]:
        p, f = self.params, self.freqs
        out = []
        worst_num = worst_t = 0.0
        for _ in range(5):
            tr1, tr2 = random_trajectory(p, self.rng), random_trajectory(p, self.rng)
            t = float(self.rng.uniform(0, 10))
            fa = fidelity_analytic(tr1, tr2, t, p, f)
            fn = fidelity_numeric(tr1, tr2, t, sigma_multiple=self.settings.sigma_multiple,
                                  points=self.settings.grid_points)
            worst_num = max(worst_num, abs(fa - fn))
            worst_t = max(worst_t, abs(fidelity_analytic(tr1, tr2, 0.0, p, f) - fidelity_analytic(tr1, tr2, 7.3, p, f)))
        out.append(_entry("fidelity.analytic_vs_quadrature", 5, worst_num, self.tol(1e-6)))
        out.append(_entry("fidelity.time_independence", 5, worst_t, self.tol(1e-12)))

        violations = 0.0
        for _ in range(100):
            a, b, c = (random_trajectory(p, self.rng, scale=2.0) for _ in range(3))
            dab, dbc, dac = (trajectory_distance(u, v, p, f) for u, v in ((a, b), (b, c), (a, c)))
            violations = max(
                violations,
                dac - (dab + dbc),
                abs(dab - trajectory_distance(b, a, p, f)),
                trajectory_distance(a, a, p, f),
                -min(dab, dbc, dac),
                abs(fidelity_analytic(a, b, 0.0, p, f) - math.exp(-dab**2 / p.hbar)),
            )
        out.append(_entry("fidelity.distance_metric_properties", 100, max(violations, 0.0), 1e-12))
        return out


def run_suite(params: TrapParameters, suite: str = "all", settings: VerifySettings | None = None) -> list[dict]:
    """Run one suite (or ``"all"``) and return its report entries."""
    settings = settings or VerifySettings()
    names = SUITES if suite == "all" else (suite,)
    unknown = set(names) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    runner = _Suite(params, settings)
    entries = []
    for name in names:
        entries.extend(getattr(runner, name)())
    return entries
