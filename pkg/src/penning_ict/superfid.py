"""Ground-state packets on classical orbits: two-branch superpositions and
the fidelity distance between orbits.

For the superposition ``psi_+ + i psi_-`` of packets on opposite orbits, the
interference term shifts the centroid to ``C p(t) / (m omega)`` per axis with

    C = exp(-m (lambda_perp^2 w_perp + lambda_z^2 w_z) / hbar) = exp(-2 Q / hbar),

and the variances about that centroid are the closed forms in
:func:`superposition_moments_closed_form`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import Trajectory, quadratic_form_Q
from .ict import IctState
from .numverify import RESOLUTION, GridField, GridSpec, auto_grid, integrate, sample
from .specialfn import QuantumNumbers, log_normalization
from .stationary import StationaryState, energy
from .trapcore import DerivedFrequencies, PhaseSpacePoint, TrapParameters, derive_frequencies

__all__ = [
    "SpecialTrajectoryParams",
    "SuperpositionState",
    "eval_ground_ict",
    "eval_superposition",
    "special_trajectory",
    "superposition_norm",
    "superposition_centroid_numeric",
    "superposition_central_moments",
    "superposition_moments_closed_form",
    "centroid_prefactor_closed_form",
    "measure_centroid_prefactor",
    "fidelity_analytic",
    "fidelity_numeric",
    "trajectory_distance",
]

GROUND = QuantumNumbers(0, 0, 0)


@dataclass(frozen=True)
class SpecialTrajectoryParams:
    """Orbit started at the origin with momentum ``(p, 0, q)``."""

    p: float
    q: float
    lambda_perp: float
    lambda_z: float

    @classmethod
    def from_kicks(cls, p: float, q: float, params: TrapParameters) -> "SpecialTrajectoryParams":
        f = derive_frequencies(params)
        return cls(p, q, p / (params.mass * f.omega_perp), q / (params.mass * f.omega_z))

    @classmethod
    def from_amplitudes(cls, lambda_perp: float, lambda_z: float,
                        params: TrapParameters) -> "SpecialTrajectoryParams":
        f = derive_frequencies(params)
        return cls(lambda_perp * params.mass * f.omega_perp, lambda_z * params.mass * f.omega_z,
                   lambda_perp, lambda_z)

    def check(self, params: TrapParameters) -> None:
        f = derive_frequencies(params)
        if not (math.isclose(self.lambda_perp, self.p / (params.mass * f.omega_perp), rel_tol=1e-12, abs_tol=1e-300)
                and math.isclose(self.lambda_z, self.q / (params.mass * f.omega_z), rel_tol=1e-12, abs_tol=1e-300)):
            raise ValueError("amplitudes are inconsistent with the momentum kicks")

    def trajectory(self, params: TrapParameters) -> Trajectory:
        self.check(params)
        return Trajectory(PhaseSpacePoint(0.0, 0.0, 0.0, self.p, 0.0, self.q), params)


def special_trajectory(params: TrapParameters, stp: SpecialTrajectoryParams, t: float) -> PhaseSpacePoint:
    """Closed-form state of the origin-started orbit with kicks ``(p, 0, q)``."""
    f = derive_frequencies(params)
    half = 0.5 * f.omega_c * t
    s, c = math.sin(f.omega_perp * t), math.cos(f.omega_perp * t)
    return PhaseSpacePoint(
        stp.lambda_perp * math.cos(half) * s,
        -stp.lambda_perp * math.sin(half) * s,
        stp.lambda_z * math.sin(f.omega_z * t),
        stp.p * math.cos(half) * c,
        -stp.p * math.sin(half) * c,
        stp.q * math.cos(f.omega_z * t),
    )


def eval_ground_ict(trajectory: Trajectory, params: TrapParameters, r, t: float):
    """Normalized ground-state packet riding on ``trajectory``, in closed form."""
    f = trajectory.frequencies
    m, hbar = params.mass, params.hbar
    r = np.asarray(r, dtype=float)
    point = trajectory.phase_space(t)
    rt, pt = point[:3], point[3:]
    d = r - rt
    e0 = energy(GROUND, params, f)
    phase = -(e0 * t + 0.5 * float(rt @ pt) - r @ pt) / hbar
    gauss = -m * (f.omega_perp * (d[..., 0] ** 2 + d[..., 1] ** 2) + f.omega_z * d[..., 2] ** 2) / (2 * hbar)
    return np.exp(log_normalization(GROUND, params, f) + gauss + 1j * phase)


@dataclass(frozen=True)
class SuperpositionState:
    """``psi_+ + i psi_-``, ground-state packets on opposite orbits; not normalized."""

    plus: IctState
    minus: IctState
    relative_phase: complex = 1j

    def __post_init__(self):
        if self.relative_phase != 1j:
            raise ValueError("relative phase is fixed to i")
        for branch in (self.plus, self.minus):
            if branch.base.qn != GROUND:
                raise ValueError("superposition branches must use the ground state")
        if not np.array_equal(self.plus.trajectory.initial.as_array(), -self.minus.trajectory.initial.as_array()):
            raise ValueError("branch trajectories must be exact negatives")

    @classmethod
    def from_trajectory(cls, trajectory: Trajectory) -> "SuperpositionState":
        base = StationaryState(GROUND, trajectory.params)
        return cls(IctState(base, trajectory), IctState(base, trajectory.scaled(-1.0)))

    @property
    def params(self) -> TrapParameters:
        return self.plus.params

    @property
    def trajectory(self) -> Trajectory:
        return self.plus.trajectory

    @property
    def energy_scale(self) -> float:
        return self.plus.energy_scale

    def __call__(self, r, t):
        return eval_superposition(self, r, t)

    def support(self, t: float = 0.0, sigma_multiple: float = 8.0):
        _, half, wavenumber = self.plus.base.support(t, sigma_multiple)
        # the interference fringes carry twice the branch momentum
        fringes = 2 * np.abs(self.trajectory.momentum(t)) / self.params.hbar
        return np.zeros(3), half + np.abs(self.trajectory.position(t)), wavenumber + fringes


def eval_superposition(state: SuperpositionState, r, t: float):
    return state.plus(r, t) + state.relative_phase * state.minus(r, t)


def _density(state, grid: GridSpec | None, t: float) -> GridField:
    if grid is None:
        grid = auto_grid(state, t)
    return GridField(grid, np.abs(sample(state, grid, t).values) ** 2)


def superposition_norm(state: SuperpositionState, t: float, grid: GridSpec | None = None) -> float:
    """Squared norm of the (unnormalized) superposition."""
    return integrate(_density(state, grid, t), decay_tol=1e-10)


def superposition_centroid_numeric(state: SuperpositionState, t: float, grid: GridSpec | None = None) -> np.ndarray:
    rho = _density(state, grid, t)
    norm = integrate(rho, decay_tol=1e-10)
    return np.array([integrate(rho, lambda pos, k=k: pos[..., k], decay_tol=1e-10) for k in range(3)]) / norm


def superposition_central_moments(state: SuperpositionState, t: float, grid: GridSpec | None = None,
                                  center=None) -> np.ndarray:
    """Second moments ``<(x_k - c_k)^2>`` of the normalized superposition density.

    ``center`` defaults to the superposition's own centroid, which is the
    center the closed forms refer to.
    """
    rho = _density(state, grid, t)
    norm = integrate(rho, decay_tol=1e-10)
    if center is None:
        center = np.array(
            [integrate(rho, lambda pos, k=k: pos[..., k], decay_tol=1e-10) for k in range(3)]
        ) / norm
    center = np.asarray(center, dtype=float)
    return np.array([
        integrate(rho, lambda pos, k=k: (pos[..., k] - center[k]) ** 2, decay_tol=1e-10) / norm
        for k in range(3)
    ])


def centroid_prefactor_closed_form(params: TrapParameters, stp: SpecialTrajectoryParams) -> float:
    f = derive_frequencies(params)
    return math.exp(-params.mass * (stp.lambda_perp**2 * f.omega_perp + stp.lambda_z**2 * f.omega_z) / params.hbar)


def superposition_moments_closed_form(params: TrapParameters, stp: SpecialTrajectoryParams, t: float) -> np.ndarray:
    """Variances of the superposition along x, y, z for the origin-started orbit."""
    f = derive_frequencies(params)
    m, hbar = params.mass, params.hbar
    overlap = math.exp(
        -2 * m * (stp.lambda_perp**2 * f.omega_perp + stp.lambda_z**2 * f.omega_z) / hbar
    )
    half = 0.5 * f.omega_c * t
    s2, c2 = math.sin(f.omega_perp * t) ** 2, math.cos(f.omega_perp * t) ** 2
    transverse = s2 - overlap * c2
    axial = math.sin(f.omega_z * t) ** 2 - overlap * math.cos(f.omega_z * t) ** 2
    return np.array([
        hbar / (2 * m * f.omega_perp) + stp.lambda_perp**2 * math.cos(half) ** 2 * transverse,
        hbar / (2 * m * f.omega_perp) + stp.lambda_perp**2 * math.sin(half) ** 2 * transverse,
        hbar / (2 * m * f.omega_z) + stp.lambda_z**2 * axial,
    ])


def centroid_pattern(params: TrapParameters, stp: SpecialTrajectoryParams, t: float) -> np.ndarray:
    """Trig pattern multiplying ``C`` in the superposition centroid."""
    f = derive_frequencies(params)
    half = 0.5 * f.omega_c * t
    c = math.cos(f.omega_perp * t)
    return np.array([
        stp.lambda_perp * math.cos(half) * c,
        -stp.lambda_perp * math.sin(half) * c,
        stp.lambda_z * math.cos(f.omega_z * t),
    ])


def measure_centroid_prefactor(state: SuperpositionState, stp: SpecialTrajectoryParams, times,
                               min_pattern: float = 0.05) -> np.ndarray:
    """Centroid divided componentwise by its trig pattern, shape ``(len(times), 3)``.

    Components whose pattern is smaller than ``min_pattern`` times the
    corresponding amplitude are NaN, so near-zeros of the denominator are skipped.
    """
    params = state.params
    out = []
    amplitude = np.array([abs(stp.lambda_perp), abs(stp.lambda_perp), abs(stp.lambda_z)])
    for t in times:
        pattern = centroid_pattern(params, stp, t)
        measured = superposition_centroid_numeric(state, t)
        ok = np.abs(pattern) > min_pattern * amplitude
        ratio = np.full(3, np.nan)
        ratio[ok] = measured[ok] / pattern[ok]
        out.append(ratio)
    return np.array(out)


def fidelity_analytic(tr1: Trajectory, tr2: Trajectory, t: float,
                      params: TrapParameters, freqs: DerivedFrequencies) -> float:
    """``exp(-Q(p1 - p2, r1 - r2) / hbar)`` for ground-state packets on the two orbits."""
    if tr1.params != tr2.params:
        raise ValueError("trajectories belong to different traps")
    delta = tr1.phase_space(t) - tr2.phase_space(t)
    return math.exp(-float(quadratic_form_Q(delta, params, freqs)) / params.hbar)


def _pair_grid(tr1: Trajectory, tr2: Trajectory, t: float, sigma_multiple: float, points: int) -> GridSpec:
    base = StationaryState(GROUND, tr1.params)
    _, half, wavenumber = base.support(t, sigma_multiple)
    r1, r2 = tr1.position(t), tr2.position(t)
    half = half + 0.5 * np.abs(r1 - r2)
    # the overlap integrand oscillates with the momentum mismatch
    wavenumber = wavenumber + np.abs(tr1.momentum(t) - tr2.momentum(t)) / tr1.params.hbar
    needed = [max(points, math.ceil(2 * h * k / RESOLUTION) + 1) for h, k in zip(half, wavenumber)]
    return GridSpec(tuple(0.5 * (r1 + r2)), tuple(half), tuple(needed))


def fidelity_numeric(tr1: Trajectory, tr2: Trajectory, t: float, grid: GridSpec | None = None,
                     sigma_multiple: float = 8.0, points: int = 96) -> float:
    """``|<psi_1|psi_2>|^2`` by quadrature of the two closed-form packets."""
    if grid is None:
        grid = _pair_grid(tr1, tr2, t, sigma_multiple, points)
    pos = grid.positions()
    psi1 = eval_ground_ict(tr1, tr1.params, pos, t)
    psi2 = eval_ground_ict(tr2, tr2.params, pos, t)
    overlap = integrate(GridField(grid, np.conj(psi1) * psi2), decay_tol=1e-10)
    return abs(overlap) ** 2


def trajectory_distance(tr1: Trajectory, tr2: Trajectory, params: TrapParameters,
                        freqs: DerivedFrequencies) -> float:
    """``sqrt(Q)`` of the phase-space difference; the same at every time."""
    delta = tr1.initial.as_array() - tr2.initial.as_array()
    return math.sqrt(float(quadratic_form_Q(delta, params, freqs)))
