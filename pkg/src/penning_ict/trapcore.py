"""Trap parameters, derived frequencies and the trapping condition.

The Hamiltonian is

    H = (p - (e/2) B x r)^2 / 2m + (D/2)(2 z^2 - x^2 - y^2)

with B along +z.  It splits into a transverse part (oscillation at
``omega_perp`` plus a rotation at ``omega_c / 2``) and an axial oscillator at
``omega_z``.

Sign convention: ``charge`` is positive and B points along +z.  A negative
charge is modelled by reversing the field direction, which leaves every
formula here unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

__all__ = [
    "TrapParameters",
    "DerivedFrequencies",
    "PhaseSpacePoint",
    "UntrappedConfigurationError",
    "check_stability",
    "derive_frequencies",
    "characteristic_lengths",
]


class UntrappedConfigurationError(ValueError):
    """Raised when the fields do not confine the particle."""


@dataclass(frozen=True)
class TrapParameters:
    mass: float
    charge: float
    B: float
    D: float
    hbar: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value!r}")
        for name in ("mass", "charge", "B", "hbar"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @classmethod
    def from_mapping(cls, data) -> "TrapParameters":
        """Build from a dict with keys mass, charge, B, D and optionally hbar."""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown trap keys: {sorted(unknown)}")
        missing = {"mass", "charge", "B", "D"} - set(data)
        if missing:
            raise ValueError(f"missing trap keys: {sorted(missing)}")
        return cls(**{k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class DerivedFrequencies:
    omega_c: float
    omega_perp: float
    omega_z: float


@dataclass(frozen=True)
class PhaseSpacePoint:
    x: float
    y: float
    z: float
    px: float
    py: float
    pz: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_array()):
            raise ValueError("phase-space coordinates must be finite")

    @classmethod
    def from_array(cls, values) -> "PhaseSpacePoint":
        values = np.asarray(values, dtype=float)
        if values.shape != (6,):
            raise ValueError(f"expected 6 phase-space components, got shape {values.shape}")
        return cls(*(float(v) for v in values))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.px, self.py, self.pz])

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def momentum(self) -> np.ndarray:
        return np.array([self.px, self.py, self.pz])


def check_stability(params: TrapParameters) -> tuple[bool, str]:
    """Return ``(trapped, diagnostic)``.

    Trapping requires ``0 < 4 m D < e^2 B^2``: D > 0 confines axially, the
    magnetic bound keeps the transverse frequency real.
    """
    if params.D <= 0:
        return False, "axial confinement requires D>0"
    if (params.charge * params.B) ** 2 <= 4.0 * params.mass * params.D:
        return False, "magnetic bound violated: charge^2 B^2 must exceed 4 mass D"
    return True, "trapped"


def derive_frequencies(params: TrapParameters) -> DerivedFrequencies:
    trapped, diagnostic = check_stability(params)
    if not trapped:
        raise UntrappedConfigurationError(f"untrapped configuration: {diagnostic}")
    m, e, B, D = params.mass, params.charge, params.B, params.D
    omega_c = e * B / m
    omega_perp_sq = (e * B) ** 2 / (4.0 * m * m) - D / m
    return DerivedFrequencies(
        omega_c=omega_c,
        omega_perp=math.sqrt(omega_perp_sq),
        omega_z=math.sqrt(2.0 * D / m),
    )


def characteristic_lengths(params: TrapParameters, freqs: DerivedFrequencies) -> tuple[float, float]:
    """Ground-state widths ``(a_perp, a_z) = sqrt(hbar / (m omega))``."""
    a_perp = math.sqrt(params.hbar / (params.mass * freqs.omega_perp))
    a_z = math.sqrt(params.hbar / (params.mass * freqs.omega_z))
    return a_perp, a_z
