"""Associated Laguerre and physicists' Hermite polynomials, plus the
log-space normalization constant of the trap eigenfunctions."""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

import numpy as np

__all__ = ["QuantumNumbers", "laguerre_assoc", "hermite", "log_normalization"]


def _nonnegative_int(value, name: str) -> int:
    try:
        value = operator.index(value)
    except TypeError:
        raise TypeError(f"{name} must be an integer, got {value!r}") from None
    if value < 0:
        raise ValueError(f"{name} must be nonnegative, got {value}")
    return value


@dataclass(frozen=True)
class QuantumNumbers:
    """Radial ``n``, angular momentum ``l`` and axial ``nz`` quantum numbers."""

    n: int
    l: int  # noqa: E741
    nz: int

    def __post_init__(self):
        for name in ("n", "l", "nz"):
            object.__setattr__(self, name, _nonnegative_int(getattr(self, name), name))


def laguerre_assoc(n: int, l: int, x):  # noqa: E741
    """Associated Laguerre polynomial ``L_n^l(x)`` by upward recurrence in n.

    Uses ``(k+1) L_{k+1} = (2k + l + 1 - x) L_k - (k + l) L_{k-1}`` starting
    from ``L_0 = 1`` and ``L_1 = 1 + l - x``.
    """
    n = _nonnegative_int(n, "n")
    l = _nonnegative_int(l, "l")  # noqa: E741
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + l - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + l + 1 - x) * cur - (k + l) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def hermite(n: int, x):
    """Physicists' Hermite polynomial ``H_n(x)``."""
    n = _nonnegative_int(n, "n")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * x
    for k in range(1, n):
        prev, cur = cur, 2.0 * x * cur - 2.0 * k * prev
    return cur if cur.ndim else float(cur)


def log_normalization(qn: QuantumNumbers, params, freqs) -> float:
    """Half the log of the squared-amplitude normalization ``N_{n l nz}``.

    N = n! (m/hbar)^(l+3/2) w_perp^(l+1) w_z^(1/2) / (pi^(3/2) (n+l)! 2^nz nz!)

    The power of two carries the axial quantum number: it comes from the
    Hermite norm ``sqrt(pi) 2^nz nz!``.
    """
    m, hbar = params.mass, params.hbar
    log_n = (
        math.lgamma(qn.n + 1)
        + (qn.l + 1.5) * math.log(m / hbar)
        + (qn.l + 1) * math.log(freqs.omega_perp)
        + 0.5 * math.log(freqs.omega_z)
        - 1.5 * math.log(math.pi)
        - math.lgamma(qn.n + qn.l + 1)
        - qn.nz * math.log(2.0)
        - math.lgamma(qn.nz + 1)
    )
    return 0.5 * log_n
