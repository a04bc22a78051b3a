"""Classical orbits in the Penning trap.

The closed-form orbit is the transverse oscillation at ``omega_perp``
composed with a rigid rotation by ``-omega_c t / 2`` about the z axis, plus an
independent axial oscillation.  A fixed-step RK4 integrator of the canonical
equations is kept alongside as an independent check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .trapcore import DerivedFrequencies, PhaseSpacePoint, TrapParameters, derive_frequencies

__all__ = [
    "Trajectory",
    "evaluate_trajectory",
    "canonical_rhs",
    "integrate_oracle",
    "hamiltonian_value",
    "quadratic_form_Q",
    "write_trajectory_csv",
    "read_trajectory_csv",
]

TRAJECTORY_COLUMNS = ("t", "x", "y", "z", "px", "py", "pz")


@dataclass(frozen=True)
class Trajectory:
    initial: PhaseSpacePoint
    params: TrapParameters
    frequencies: DerivedFrequencies = field(default=None)

    def __post_init__(self):
        freqs = derive_frequencies(self.params)
        if self.frequencies is None:
            object.__setattr__(self, "frequencies", freqs)
        elif not np.allclose(
            [self.frequencies.omega_c, self.frequencies.omega_perp, self.frequencies.omega_z],
            [freqs.omega_c, freqs.omega_perp, freqs.omega_z],
            rtol=1e-14,
            atol=0.0,
        ):
            raise ValueError("cached frequencies are inconsistent with the trap parameters")

    def phase_space(self, t) -> np.ndarray:
        """Vectorized closed-form state; returns shape ``np.shape(t) + (6,)``."""
        t = np.asarray(t, dtype=float)
        m = self.params.mass
        w = self.frequencies.omega_perp
        wz = self.frequencies.omega_z
        x0, y0, z0, px0, py0, pz0 = self.initial.as_array()

        c, s = np.cos(w * t), np.sin(w * t)
        # oscillation in the co-rotating frame
        u = x0 * c + px0 / (m * w) * s
        v = y0 * c + py0 / (m * w) * s
        pu = px0 * c - m * w * x0 * s
        pv = py0 * c - m * w * y0 * s

        cr, sr = np.cos(0.5 * self.frequencies.omega_c * t), np.sin(0.5 * self.frequencies.omega_c * t)
        cz, sz = np.cos(wz * t), np.sin(wz * t)
        return np.stack(
            [
                cr * u + sr * v,
                cr * v - sr * u,
                z0 * cz + pz0 / (m * wz) * sz,
                cr * pu + sr * pv,
                cr * pv - sr * pu,
                pz0 * cz - m * wz * z0 * sz,
            ],
            axis=-1,
        )

    def position(self, t) -> np.ndarray:
        return self.phase_space(t)[..., :3]

    def momentum(self, t) -> np.ndarray:
        return self.phase_space(t)[..., 3:]

    def scaled(self, factor: float) -> "Trajectory":
        """Trajectory with every initial value multiplied by ``factor``."""
        return Trajectory(
            PhaseSpacePoint.from_array(factor * self.initial.as_array()), self.params, self.frequencies
        )


def evaluate_trajectory(traj: Trajectory, t: float) -> PhaseSpacePoint:
    return PhaseSpacePoint.from_array(traj.phase_space(float(t)))


def _as_state_array(state) -> np.ndarray:
    if isinstance(state, PhaseSpacePoint):
        return state.as_array()
    return np.asarray(state, dtype=float)


def _rhs_array(s: np.ndarray, m: float, freqs: DerivedFrequencies) -> np.ndarray:
    x, y, z, px, py, pz = np.moveaxis(s, -1, 0)
    half_wc = 0.5 * freqs.omega_c
    w2 = freqs.omega_perp**2
    return np.stack(
        [
            px / m + half_wc * y,
            py / m - half_wc * x,
            pz / m,
            -m * w2 * x + half_wc * py,
            -m * w2 * y - half_wc * px,
            -m * freqs.omega_z**2 * z,
        ],
        axis=-1,
    )


def canonical_rhs(state: PhaseSpacePoint, params: TrapParameters, freqs: DerivedFrequencies) -> PhaseSpacePoint:
    """Hamilton's equations: time derivative of ``(x, y, z, px, py, pz)``."""
    return PhaseSpacePoint.from_array(_rhs_array(_as_state_array(state), params.mass, freqs))


def integrate_oracle(initial, params: TrapParameters, t_final: float, dt: float):
    """Classical fixed-step RK4 of the canonical equations.

    ``initial`` is a PhaseSpacePoint (returns one) or an array ``(..., 6)`` of
    states integrated together (returns an array).  The step is shrunk so that
    an integer number of steps lands on ``t_final`` exactly.  Steps with
    ``dt * max(omega) >= 0.1`` are rejected.
    """
    freqs = derive_frequencies(params)
    if not dt > 0:
        raise ValueError("dt must be positive")
    omega_max = max(freqs.omega_c, freqs.omega_perp, freqs.omega_z)
    if dt * omega_max >= 0.1:
        raise ValueError(f"unstable step: dt*max(omega) = {dt * omega_max:.3g} >= 0.1")
    s = _as_state_array(initial).copy()
    if t_final != 0:
        n_steps = max(1, math.ceil(abs(t_final) / dt - 1e-9))
        h = t_final / n_steps
        # the equations are linear: rhs(s) = s @ gen, with gen read off the basis states
        gen = _rhs_array(np.eye(6), params.mass, freqs)
        for _ in range(n_steps):
            k1 = s @ gen
            k2 = (s + 0.5 * h * k1) @ gen
            k3 = (s + 0.5 * h * k2) @ gen
            k4 = (s + h * k3) @ gen
            s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if isinstance(initial, PhaseSpacePoint):
        return PhaseSpacePoint.from_array(s)
    return s


def hamiltonian_value(state, params: TrapParameters, freqs: DerivedFrequencies):
    """Energy ``H_perp + H_z``; accepts a PhaseSpacePoint or an array ``(..., 6)``."""
    x, y, z, px, py, pz = np.moveaxis(_as_state_array(state), -1, 0)
    m = params.mass
    h_perp = (
        (px**2 + py**2) / (2 * m)
        + 0.5 * m * freqs.omega_perp**2 * (x**2 + y**2)
        - 0.5 * freqs.omega_c * (x * py - y * px)
    )
    h_z = pz**2 / (2 * m) + 0.5 * m * freqs.omega_z**2 * z**2
    return h_perp + h_z


def quadratic_form_Q(state, params: TrapParameters, freqs: DerivedFrequencies):
    """Positive-definite constant of motion that sets the fidelity of two packets.

    Q = p_perp^2/(2 m w_perp) + p_z^2/(2 m w_z) + m w_perp x_perp^2/2 + m w_z z^2/2
    """
    x, y, z, px, py, pz = np.moveaxis(_as_state_array(state), -1, 0)
    m, w, wz = params.mass, freqs.omega_perp, freqs.omega_z
    return (
        (px**2 + py**2) / (2 * m * w)
        + pz**2 / (2 * m * wz)
        + 0.5 * m * w * (x**2 + y**2)
        + 0.5 * m * wz * z**2
    )


def write_trajectory_csv(path_or_file, times, states, energies=None) -> None:
    """Write ``t,x,y,z,px,py,pz[,energy]`` rows with round-trip float formatting."""
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=float)
    header = list(TRAJECTORY_COLUMNS)
    if energies is not None:
        header.append("energy")

    def _write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i, t in enumerate(times):
            row = [t, *states[i]]
            if energies is not None:
                row.append(energies[i])
            writer.writerow([repr(float(v)) for v in row])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.genfromtxt(path, delimiter=",", names=True)
    times = np.atleast_1d(data["t"])
    states = np.stack([np.atleast_1d(data[c]) for c in TRAJECTORY_COLUMNS[1:]], axis=-1)
    return times, states
