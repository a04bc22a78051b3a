import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from penning_ict.trapcore import (
    PhaseSpacePoint,
    TrapParameters,
    UntrappedConfigurationError,
    characteristic_lengths,
    check_stability,
    derive_frequencies,
)


def test_reference_frequencies(trap):
    f = derive_frequencies(trap)
    assert f.omega_c == pytest.approx(2.0, rel=1e-15)
    assert f.omega_perp == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert f.omega_z == pytest.approx(1.0, rel=1e-15)


def test_pure_magnetic_limit():
    f = derive_frequencies(TrapParameters(1.0, 1.0, 2.0, 1e-12))
    assert f.omega_perp == pytest.approx(1.0, abs=1e-11)


def test_equality_case_is_untrapped():
    with pytest.raises(UntrappedConfigurationError, match="untrapped configuration"):
        derive_frequencies(TrapParameters(1.0, 1.0, 2.0, 1.0))


def test_stability_verdicts(trap):
    assert check_stability(trap)[0]
    ok, msg = check_stability(TrapParameters(1.0, 1.0, 1.0, 1.0))
    assert not ok and "magnetic bound violated" in msg
    ok, msg = check_stability(TrapParameters(1.0, 1.0, 2.0, 0.0))
    assert not ok and "axial confinement requires D>0" in msg


@pytest.mark.parametrize("field,value", [("mass", 0.0), ("charge", -1.0), ("B", 0.0), ("hbar", -2.0),
                                         ("D", math.nan)])
def test_invalid_fields_rejected(field, value):
    kwargs = dict(mass=1.0, charge=1.0, B=2.0, D=0.5, hbar=1.0)
    kwargs[field] = value
    with pytest.raises(ValueError):
        TrapParameters(**kwargs)


def test_mapping_round_trip(trap):
    assert TrapParameters.from_mapping(trap.to_dict()) == trap
    with pytest.raises(ValueError, match="unknown"):
        TrapParameters.from_mapping({**trap.to_dict(), "E": 1})
    with pytest.raises(ValueError, match="missing"):
        TrapParameters.from_mapping({"mass": 1, "charge": 1, "B": 2})


def test_characteristic_lengths(trap):
    f = derive_frequencies(trap)
    a_perp, a_z = characteristic_lengths(trap, f)
    assert a_perp == pytest.approx(0.5 ** -0.25, rel=1e-15)
    assert a_z == pytest.approx(1.0, rel=1e-15)


def test_phase_space_point_array_round_trip():
    p = PhaseSpacePoint(1, 2, 3, 4, 5, 6)
    assert PhaseSpacePoint.from_array(p.as_array()) == p
    with pytest.raises(ValueError):
        PhaseSpacePoint(math.inf, 0, 0, 0, 0, 0)


positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


@given(mass=positive, charge=positive, B=positive, D=st.floats(min_value=-10, max_value=1e3))
def test_stability_agrees_with_derivation(mass, charge, B, D):
    params = TrapParameters(mass, charge, B, D)
    ok, _ = check_stability(params)
    try:
        f = derive_frequencies(params)
    except UntrappedConfigurationError:
        assert not ok
    else:
        assert ok
        # w_perp^2 + w_z^2 / 2 = (w_c / 2)^2
        assert f.omega_perp**2 + 0.5 * f.omega_z**2 == pytest.approx(0.25 * f.omega_c**2, rel=1e-12)
