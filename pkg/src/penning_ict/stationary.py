"""Stationary eigenstates of a charged particle in the Penning trap."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specialfn import QuantumNumbers, hermite, laguerre_assoc, log_normalization
from .trapcore import DerivedFrequencies, TrapParameters, characteristic_lengths, derive_frequencies

__all__ = [
    "StationaryState",
    "energy",
    "energy_scale",
    "eval_eigenfunction",
    "eval_density_current",
    "vector_potential",
]


def energy(qn: QuantumNumbers, params: TrapParameters, freqs: DerivedFrequencies) -> float:
    """E = hbar [w_perp (2n + l + 1) - l w_c / 2 + (nz + 1/2) w_z]."""
    return params.hbar * (
        freqs.omega_perp * (2 * qn.n + qn.l + 1)
        - 0.5 * qn.l * freqs.omega_c
        + (qn.nz + 0.5) * freqs.omega_z
    )


def energy_scale(qn: QuantumNumbers, params: TrapParameters, freqs: DerivedFrequencies) -> float:
    """Sum of the magnitudes of the terms in :func:`energy`.

    Used to make residuals dimensionless; unlike the energy itself it cannot
    vanish through cancellation of the rotational term.
    """
    return params.hbar * (
        freqs.omega_perp * (2 * qn.n + qn.l + 1)
        + 0.5 * qn.l * freqs.omega_c
        + (qn.nz + 0.5) * freqs.omega_z
    )


def vector_potential(r, params: TrapParameters) -> np.ndarray:
    """Symmetric gauge ``A = B x r / 2`` with B along +z."""
    r = np.asarray(r, dtype=float)
    x, y = r[..., 0], r[..., 1]
    half_b = 0.5 * params.B
    return np.stack([-half_b * y, half_b * x, np.zeros_like(x)], axis=-1)


@dataclass(frozen=True)
class StationaryState:
    qn: QuantumNumbers
    params: TrapParameters
    freqs: DerivedFrequencies = field(default=None)
    log_norm: float = field(default=None)

    def __post_init__(self):
        if self.freqs is None:
            object.__setattr__(self, "freqs", derive_frequencies(self.params))
        expected = log_normalization(self.qn, self.params, self.freqs)
        if self.log_norm is None:
            object.__setattr__(self, "log_norm", expected)
        elif not math.isclose(self.log_norm, expected, rel_tol=1e-14, abs_tol=1e-14):
            raise ValueError("log_norm is inconsistent with the quantum numbers and trap")

    @classmethod
    def of(cls, n: int, l: int, nz: int, params: TrapParameters) -> "StationaryState":  # noqa: E741
        return cls(QuantumNumbers(n, l, nz), params)

    @property
    def energy(self) -> float:
        return energy(self.qn, self.params, self.freqs)

    @property
    def energy_scale(self) -> float:
        return energy_scale(self.qn, self.params, self.freqs)

    @property
    def lengths(self) -> tuple[float, float]:
        return characteristic_lengths(self.params, self.freqs)

    def __call__(self, r, t):
        return eval_eigenfunction(self, r, t)

    def support(self, t: float = 0.0, sigma_multiple: float = 8.0):
        """``(center, half_extent, wavenumber)`` of the density; it does not move.

        The density oscillates at most at ``2 sqrt(2n + l + 1) / a_perp``
        transversally and ``2 sqrt(2nz + 1) / a_z`` axially.
        """
        a_perp, a_z = self.lengths
        n_perp = math.sqrt(2 * self.qn.n + self.qn.l + 1)
        n_z = math.sqrt(2 * self.qn.nz + 1)
        half = sigma_multiple * np.array([n_perp * a_perp, n_perp * a_perp, n_z * a_z])
        wavenumber = 2 * np.array([n_perp / a_perp, n_perp / a_perp, n_z / a_z])
        return np.zeros(3), half, wavenumber


def _spatial_factors(state: StationaryState, r):
    """Return ``(magnitude_real, l * phi)`` so that psi(t=0) = real * exp(i l phi)."""
    r = np.asarray(r, dtype=float)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    m, hbar = state.params.mass, state.params.hbar
    w, wz = state.freqs.omega_perp, state.freqs.omega_z
    qn = state.qn

    rho2 = x * x + y * y
    s = m * w * rho2 / hbar
    zeta = math.sqrt(m * wz / hbar) * z
    real = (
        np.exp(state.log_norm - 0.5 * s - 0.5 * zeta * zeta)
        * laguerre_assoc(qn.n, qn.l, s)
        * hermite(qn.nz, zeta)
    )
    if qn.l:
        real = real * rho2 ** (0.5 * qn.l)
    angle = qn.l * np.arctan2(y, x)
    return real, angle


def eval_eigenfunction(state: StationaryState, r, t: float):
    """Amplitude of ``psi_{n l nz}`` at positions ``r`` (last axis of length 3) and time ``t``.

    ``(x + i y)^l`` is evaluated in polar form, ``x_perp^l exp(i l phi)``.
    """
    real, angle = _spatial_factors(state, r)
    phase = angle - state.energy * t / state.params.hbar
    return real * np.exp(1j * phase)


def eval_density_current(state: StationaryState, r):
    """Probability density and gauge-invariant current of a stationary state.

    ``j = (hbar/m) Im(psi* grad psi) - (e/m) A rho``.  The radial and axial
    factors are real, so the first term reduces to ``(hbar l / m) rho grad(phi)``
    and is azimuthal.
    """
    r = np.asarray(r, dtype=float)
    real, _ = _spatial_factors(state, r)
    rho = real * real
    x, y = r[..., 0], r[..., 1]
    m = state.params.mass
    azimuthal = np.stack([-y, x, np.zeros_like(x)], axis=-1)
    if state.qn.l:
        rho2 = x * x + y * y
        with np.errstate(divide="ignore", invalid="ignore"):
            rho_over = np.where(rho2 > 0, rho / np.where(rho2 > 0, rho2, 1.0), 0.0)
        coeff = state.params.hbar * state.qn.l / m * rho_over
    else:
        coeff = np.zeros_like(rho)
    coeff = coeff - 0.5 * state.freqs.omega_c * rho
    return rho, coeff[..., None] * azimuthal
