"""Uniform tensor-product grids, trapezoidal quadrature and grid CSV I/O.

Fields are stored as ``(Nx, Ny, Nz)`` arrays in C order, so the flattened
layout is row-major with z varying fastest.  Node coordinates include both
endpoints of every axis.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BoundaryMassWarning",
    "GridSpec",
    "GridField",
    "sample",
    "integrate",
    "boundary_ratio",
    "auto_grid",
    "born_points",
    "gram_matrix",
    "write_field_csv",
    "read_field_csv",
    "DEFAULT_POINTS",
    "DEFAULT_SIGMA_MULTIPLE",
]

DEFAULT_POINTS = 96
DEFAULT_SIGMA_MULTIPLE = 8.0
MIN_POINTS = 16


class BoundaryMassWarning(UserWarning):
    """The integrand has not decayed at the edge of the grid."""


@dataclass(frozen=True)
class GridSpec:
    center: tuple
    half_extent: tuple
    points_per_axis: tuple

    def __post_init__(self):
        center = tuple(float(c) for c in np.broadcast_to(self.center, (3,)))
        half = tuple(float(h) for h in np.broadcast_to(self.half_extent, (3,)))
        points = tuple(int(p) for p in np.broadcast_to(self.points_per_axis, (3,)))
        if not all(np.isfinite(center)) or not all(np.isfinite(half)):
            raise ValueError("grid center and extent must be finite")
        if min(half) <= 0:
            raise ValueError("half_extent must be positive on every axis")
        if min(points) < MIN_POINTS:
            raise ValueError(f"need at least {MIN_POINTS} points per axis, got {points}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "half_extent", half)
        object.__setattr__(self, "points_per_axis", points)

    @property
    def shape(self) -> tuple:
        return self.points_per_axis

    def axes(self) -> list[np.ndarray]:
        return [
            np.linspace(c - h, c + h, n)
            for c, h, n in zip(self.center, self.half_extent, self.points_per_axis)
        ]

    def spacing(self) -> np.ndarray:
        return np.array([2 * h / (n - 1) for h, n in zip(self.half_extent, self.points_per_axis)])

    def positions(self) -> np.ndarray:
        """Node coordinates, shape ``(Nx, Ny, Nz, 3)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def with_points(self, n: int) -> "GridSpec":
        return GridSpec(self.center, self.half_extent, (n, n, n))


@dataclass(frozen=True)
class GridField:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.size != int(np.prod(self.spec.shape)):
            raise ValueError(f"field has {values.size} values, grid needs {np.prod(self.spec.shape)}")
        object.__setattr__(self, "values", values.reshape(self.spec.shape))


def sample(evaluator, spec: GridSpec, t: float) -> GridField:
    """Evaluate ``evaluator(r, t)`` at every grid node."""
    values = np.asarray(evaluator(spec.positions(), t))
    if values.ndim == 0:
        values = np.full(spec.shape, values)
    return GridField(spec, values)


def _trapezoid_weights(spec: GridSpec) -> list[np.ndarray]:
    weights = []
    for h, n in zip(spec.spacing(), spec.points_per_axis):
        w = np.full(n, h)
        w[0] = w[-1] = 0.5 * h
        weights.append(w)
    return weights


def boundary_ratio(values: np.ndarray) -> float:
    """Largest magnitude on the six faces relative to the largest overall."""
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        return 0.0
    faces = max(
        mag[0].max(), mag[-1].max(),
        mag[:, 0].max(), mag[:, -1].max(),
        mag[:, :, 0].max(), mag[:, :, -1].max(),
    )
    return float(faces / peak)


def integrate(field: GridField, weight=None, decay_tol: float = 1e-12):
    """Trapezoidal integral of ``field.values * weight`` over the box.

    ``weight`` may be an array broadcastable to the grid or a callable of the
    node positions ``(Nx, Ny, Nz, 3)``.  A :class:`BoundaryMassWarning` is
    emitted when the integrand at the boundary exceeds ``decay_tol`` times its
    peak.
    """
    integrand = field.values
    if weight is not None:
        if callable(weight):
            weight = weight(field.spec.positions())
        integrand = integrand * np.asarray(weight)
    ratio = boundary_ratio(integrand)
    if ratio > decay_tol:
        warnings.warn(
            f"integrand at grid boundary is {ratio:.3g} of its peak (limit {decay_tol:.1g})",
            BoundaryMassWarning,
            stacklevel=2,
        )
    wx, wy, wz = _trapezoid_weights(field.spec)
    total = np.sum(integrand * (wx[:, None, None] * wy[None, :, None] * wz[None, None, :]))
    if np.iscomplexobj(total):
        return complex(total)
    return float(total)


def gram_matrix(evaluators, spec: GridSpec, t: float) -> np.ndarray:
    """Overlaps ``<psi_a|psi_b>`` of several evaluators on one grid.

    The grid is swept one x-slab at a time so memory stays at one slab per
    evaluator.
    """
    x_axis, y_axis, z_axis = spec.axes()
    wx, wy, wz = _trapezoid_weights(spec)
    plane = np.stack(np.meshgrid(y_axis, z_axis, indexing="ij"), axis=-1)
    plane_weight = (wy[:, None] * wz[None, :]).ravel()
    gram = np.zeros((len(evaluators), len(evaluators)), dtype=complex)
    for i, x in enumerate(x_axis):
        pos = np.concatenate([np.full(plane.shape[:-1] + (1,), x), plane], axis=-1)
        block = np.stack([np.asarray(ev(pos, t)).ravel() for ev in evaluators])
        gram += wx[i] * (block.conj() * plane_weight) @ block.T
    return gram


# upper bound on spacing * wavenumber of the density; pi would be the Nyquist limit
RESOLUTION = 2.4


def auto_grid(state, t: float, sigma_multiple: float = DEFAULT_SIGMA_MULTIPLE,
              points: int = DEFAULT_POINTS) -> GridSpec:
    """Box sized from the state's own characteristic lengths.

    ``state`` must provide ``support(t, sigma_multiple)`` returning
    ``(center, half_extent, wavenumber)``, where ``wavenumber`` bounds the
    per-axis bandwidth of the density.  ``points`` is a floor: axes are refined
    until ``spacing * wavenumber <= RESOLUTION``, which matters for highly
    excited states whose box grows faster than their nodal spacing shrinks.
    """
    center, half_extent, wavenumber = state.support(t, sigma_multiple)
    needed = [
        max(points, math.ceil(2 * h * k / RESOLUTION) + 1)
        for h, k in zip(np.broadcast_to(half_extent, (3,)), np.broadcast_to(wavenumber, (3,)))
    ]
    return GridSpec(tuple(center), tuple(half_extent), tuple(needed))


def born_points(state, t: float, n: int, rng: np.random.Generator,
                sigma_multiple: float = 4.0, points: int = 64) -> np.ndarray:
    """Draw ``n`` positions distributed like ``|state(r, t)|^2``.

    A grid cell is picked with probability proportional to the density at its
    node, then the point is jittered uniformly within the cell.
    """
    grid = auto_grid(state, t, sigma_multiple=sigma_multiple, points=points)
    rho = np.abs(sample(state, grid, t).values).ravel() ** 2
    idx = rng.choice(rho.size, size=n, p=rho / rho.sum())
    nodes = grid.positions().reshape(-1, 3)[idx]
    return nodes + rng.uniform(-0.5, 0.5, size=(n, 3)) * grid.spacing()


_META = re.compile(r"#\s*center=(?P<c>[^;]+);\s*half_extent=(?P<h>[^;]+);\s*points=(?P<p>.+)")


def _fmt_vec(v) -> str:
    return ",".join(repr(float(x)) if not isinstance(x, (int, np.integer)) else str(x) for x in v)


def write_field_csv(path_or_file, field: GridField) -> None:
    """Write ``x,y,z,re,im,rho`` rows, preceded by a metadata line for the grid."""
    spec = field.spec
    pos = spec.positions().reshape(-1, 3)
    vals = np.asarray(field.values, dtype=complex).reshape(-1)
    table = np.column_stack([pos, vals.real, vals.imag, np.abs(vals) ** 2])
    meta = (
        f"# center={_fmt_vec(spec.center)}; half_extent={_fmt_vec(spec.half_extent)}; "
        f"points={_fmt_vec(spec.points_per_axis)}\n"
    )

    def _write(fh):
        fh.write(meta)
        fh.write("x,y,z,re,im,rho\n")
        np.savetxt(fh, table, fmt="%.17g", delimiter=",")

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


def read_field_csv(path) -> GridField:
    """Inverse of :func:`write_field_csv`; the grid is rebuilt from the metadata line."""
    with open(path) as fh:
        first = fh.readline()
    match = _META.match(first.strip())
    if match is None:
        raise ValueError(f"{path}: missing grid metadata line")
    center = [float(v) for v in match["c"].split(",")]
    half = [float(v) for v in match["h"].split(",")]
    points = [int(v) for v in match["p"].split(",")]
    spec = GridSpec(tuple(center), tuple(half), tuple(points))
    table = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    return GridField(spec, table[:, 3] + 1j * table[:, 4])
