import numpy as np
import pytest

from penning_ict.trapcore import TrapParameters, characteristic_lengths, derive_frequencies


@pytest.fixture
def trap():
    """Reference trap: m = e = hbar = 1, B = 2, D = 0.5 (w_c = 2, w_perp = sqrt(0.5), w_z = 1)."""
    return TrapParameters(mass=1.0, charge=1.0, B=2.0, D=0.5)


@pytest.fixture
def freqs(trap):
    return derive_frequencies(trap)


@pytest.fixture
def lengths(trap, freqs):
    return characteristic_lengths(trap, freqs)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
