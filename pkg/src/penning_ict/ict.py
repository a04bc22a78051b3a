"""Injection of a classical trajectory into a stationary state.

Given a stationary solution ``psi`` and a classical orbit ``(r(t), p(t))`` in
the same trap,

    psi_ict(r, t) = exp(-i r(t).p(t) / 2 hbar) exp(i r.p(t) / hbar) psi(r - r(t), t)

is again an exact solution.  The density is the stationary one dragged along
the orbit, so the centroid follows ``r(t)`` and every central moment is frozen.

This module also holds the finite-difference residual checks shared by all
state families: anything callable as ``evaluator(r, t)`` with ``r`` of shape
``(..., 3)`` can be checked.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .classical import Trajectory
from .numverify import GridField, GridSpec, auto_grid, integrate, sample
from .stationary import StationaryState, eval_density_current, vector_potential
from .trapcore import characteristic_lengths, derive_frequencies

__all__ = [
    "IctState",
    "IllConditionedWarning",
    "eval_ict",
    "density_ict",
    "current_ict",
    "centroid",
    "central_moment",
    "schrodinger_residual",
    "continuity_residual",
    "default_steps",
    "peak_density",
]


class IllConditionedWarning(UserWarning):
    """A relative residual was requested where the amplitude is negligible."""


@dataclass(frozen=True)
class IctState:
    base: StationaryState
    trajectory: Trajectory

    def __post_init__(self):
        if self.base.params != self.trajectory.params:
            raise ValueError("base state and trajectory must share the same trap parameters")

    @property
    def params(self):
        return self.base.params

    @property
    def energy_scale(self) -> float:
        return self.base.energy_scale

    def __call__(self, r, t):
        return eval_ict(self, r, t)

    def support(self, t: float = 0.0, sigma_multiple: float = 8.0):
        _, half, wavenumber = self.base.support(t, sigma_multiple)
        return self.trajectory.position(t), half, wavenumber


def eval_ict(state: IctState, r, t: float):
    r = np.asarray(r, dtype=float)
    hbar = state.params.hbar
    point = state.trajectory.phase_space(t)
    rt, pt = point[:3], point[3:]
    phase = (r @ pt - 0.5 * float(rt @ pt)) / hbar
    return np.exp(1j * phase) * state.base(r - rt, t)


def density_ict(state: IctState, r, t: float):
    rt = state.trajectory.position(t)
    rho, _ = eval_density_current(state.base, np.asarray(r, dtype=float) - rt)
    return rho


def current_ict(state: IctState, r, t: float, *, momentum_term: bool = True):
    """Gauge-invariant probability current of the injected state.

    The stationary current is carried along the orbit and a drift term is
    added.  With the symmetric gauge the drift velocity is the kinetic one,
    ``(p(t) - e A(r(t))) / m``, which equals ``dr/dt``.  ``momentum_term=False``
    drops the ``p(t) rho / m`` piece (negative control for the continuity check).
    """
    r = np.asarray(r, dtype=float)
    params = state.params
    point = state.trajectory.phase_space(t)
    rt, pt = point[:3], point[3:]
    rho, j = eval_density_current(state.base, r - rt)
    drift = -params.charge * vector_potential(rt, params) / params.mass
    if momentum_term:
        drift = drift + pt / params.mass
    return j + rho[..., None] * drift


def _density_field(state, grid: GridSpec, t: float) -> GridField:
    return GridField(grid, np.abs(sample(state, grid, t).values) ** 2)


def centroid(state: IctState, t: float, grid: GridSpec | None = None, decay_tol: float = 1e-10) -> np.ndarray:
    """``integral r rho_ict d^3r`` on ``grid`` (default: :func:`auto_grid` at ``t``)."""
    if grid is None:
        grid = auto_grid(state, t)
    rho = _density_field(state, grid, t)
    return np.array([integrate(rho, lambda pos, k=k: pos[..., k], decay_tol=decay_tol) for k in range(3)])


def central_moment(state: IctState, t: float, orders, grid: GridSpec | None = None,
                   decay_tol: float = 1e-10) -> float:
    """``integral (x-x(t))^i (y-y(t))^j (z-z(t))^k rho_ict d^3r`` for ``i+j+k <= 4``."""
    i, j, k = (int(o) for o in orders)
    if min(i, j, k) < 0 or i + j + k > 4:
        raise ValueError(f"moment orders must be nonnegative with total <= 4, got {orders}")
    if grid is None:
        grid = auto_grid(state, t)
    rt = state.trajectory.position(t)
    rho = _density_field(state, grid, t)

    def weight(pos):
        d = pos - rt
        return d[..., 0] ** i * d[..., 1] ** j * d[..., 2] ** k

    return integrate(rho, weight, decay_tol=decay_tol)


def default_steps(params) -> tuple[float, float]:
    """Default finite-difference steps ``(h_space, h_time)``."""
    freqs = derive_frequencies(params)
    a_perp, a_z = characteristic_lengths(params, freqs)
    return 1e-3 * min(a_perp, a_z), 1e-4 / max(freqs.omega_c, freqs.omega_z)


def _offsets(h) -> np.ndarray:
    return np.diag(np.broadcast_to(np.asarray(h, dtype=float), (3,)))


# central-difference weights on offsets (-2, -1, 0, 1, 2)
_D1 = {2: (0.0, -0.5, 0.0, 0.5, 0.0), 4: (1 / 12, -8 / 12, 0.0, 8 / 12, -1 / 12)}
_D2 = {2: (0.0, 1.0, -2.0, 1.0, 0.0), 4: (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)}


def _check_order(order: int) -> None:
    if order not in _D1:
        raise ValueError(f"stencil order must be 2 or 4, got {order}")


def schrodinger_residual(evaluator, params, r, t: float, h_space=None, h_time=None,
                         energy_scale: float | None = None, peak: float | None = None,
                         order: int = 4):
    """Relative residual ``|i hbar d_t psi - H psi| / (E_scale |psi|)``.

    Central differences of the given ``order`` (2 or 4) are used for the time
    derivative, the Laplacian and the rotation term
    ``i hbar (w_c/2)(x d_y - y d_x)``.  ``r`` has shape ``(..., 3)``; one
    residual is returned per point.  Points where ``|psi| < 1e-12 * peak`` are
    returned as NaN with an :class:`IllConditionedWarning`.

    The 2nd-order stencil at the default steps leaves a truncation error of
    order ``1e-7 |laplacian^2 psi|``, which exceeds ``1e-5 |psi|`` near nodes
    and in the tails of excited states; the 4th-order stencil does not.
    """
    _check_order(order)
    freqs = derive_frequencies(params)
    m, hbar = params.mass, params.hbar
    dh, dt = default_steps(params)
    h_space = dh if h_space is None else h_space
    h_time = dt if h_time is None else h_time
    if energy_scale is None:
        energy_scale = evaluator.energy_scale
    r = np.asarray(r, dtype=float)
    steps = _offsets(h_space)
    h = np.diag(steps)
    d1, d2 = _D1[order], _D2[order]
    shifts = (-2, -1, 0, 1, 2)

    psi = evaluator(r, t)
    dpsi_dt = sum(
        w * evaluator(r, t + k * h_time) for w, k in zip(d1, shifts) if w
    ) / h_time
    lap = np.zeros_like(psi)
    grad = []
    for axis in range(3):
        vals = {k: (psi if k == 0 else evaluator(r + k * steps[axis], t))
                for k, w1, w2 in zip(shifts, d1, d2) if w1 or w2}
        lap = lap + sum(w * vals[k] for w, k in zip(d2, shifts) if w) / h[axis] ** 2
        grad.append(sum(w * vals[k] for w, k in zip(d1, shifts) if w) / h[axis])

    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    potential = 0.5 * m * (freqs.omega_perp**2 * (x * x + y * y) + freqs.omega_z**2 * z * z)
    h_psi = (
        -hbar**2 / (2 * m) * lap
        + potential * psi
        + 1j * hbar * 0.5 * freqs.omega_c * (x * grad[1] - y * grad[0])
    )
    mag = np.abs(psi)
    if peak is None:
        peak = float(np.max(mag))
    ill = mag < 1e-12 * peak
    if np.any(ill):
        warnings.warn(f"{int(np.sum(ill))} point(s) with negligible amplitude", IllConditionedWarning, stacklevel=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        res = np.abs(1j * hbar * dpsi_dt - h_psi) / (energy_scale * mag)
    return np.where(ill, np.nan, res)


def continuity_residual(state: IctState, r, t: float, h_space=None, h_time=None,
                        momentum_term: bool = True, density_scale: float | None = None):
    """``|d_t rho + div j|`` in units of ``(E_scale / hbar) * density_scale``.

    Both derivatives are central differences of :func:`density_ict` and
    :func:`current_ict`.  ``density_scale`` defaults to the peak of the
    stationary density, measured on its own grid.
    """
    params = state.params
    dh, dt = default_steps(params)
    h_space = dh if h_space is None else h_space
    h_time = dt if h_time is None else h_time
    r = np.asarray(r, dtype=float)
    steps = _offsets(h_space)
    h = np.diag(steps)

    drho_dt = (density_ict(state, r, t + h_time) - density_ict(state, r, t - h_time)) / (2 * h_time)
    div = np.zeros_like(drho_dt)
    for axis in range(3):
        jf = current_ict(state, r + steps[axis], t, momentum_term=momentum_term)[..., axis]
        jb = current_ict(state, r - steps[axis], t, momentum_term=momentum_term)[..., axis]
        div = div + (jf - jb) / (2 * h[axis])
    if density_scale is None:
        density_scale = peak_density(state.base)
    return np.abs(drho_dt + div) / (state.energy_scale / params.hbar * density_scale)


def peak_density(base: StationaryState, points: int = 64) -> float:
    """Largest stationary density found on a 64^3 grid spanning three widths."""
    grid = auto_grid(base, 0.0, sigma_multiple=3.0, points=points)
    rho = np.abs(sample(base, grid, 0.0).values) ** 2
    return float(rho.max())
