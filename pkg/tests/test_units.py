import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import zenoauger.units as u


def test_hartree_in_ev_round_value():
    q = u.Quantity(27.211386, "energy", "eV")
    assert u.convert(q, "Ha").value == pytest.approx(1.0, rel=1e-12)


def test_zero_is_zero_in_any_unit():
    assert u.convert(u.Quantity(0.0, "energy", "eV"), "Ha").value == 0.0


def test_au_time_in_fs():
    q = u.Quantity(0.02418884, "time", "fs")
    assert u.convert(q, "au").value == pytest.approx(1.0, rel=1e-12)


def test_dimension_mismatch_rejected():
    q = u.Quantity(1.0, "time", "fs")
    with pytest.raises(u.UnitError):
        u.convert(q, "eV")
    with pytest.raises(u.UnitError):
        u.Quantity(1.0, "energy", "fs")


def test_unknown_unit_rejected():
    with pytest.raises(u.UnitError):
        u.to_atomic(1.0, "meV", "energy")


@given(value=st.floats(min_value=1e-6, max_value=1e6),
       unit=st.sampled_from(["eV", "Ha", "au"]))
def test_energy_conversion_round_trips(value, unit):
    q = u.Quantity(value, "energy", unit)
    back = u.convert(u.convert(q, "Ha"), unit)
    assert back.value == pytest.approx(value, rel=1e-12)


@given(value=st.floats(min_value=1e-6, max_value=1e6))
def test_time_conversion_round_trips(value):
    q = u.Quantity(value, "time", "fs")
    back = u.convert(u.convert(q, "au"), "fs")
    assert back.value == pytest.approx(value, rel=1e-12)


def test_lithium_intensity_rabi_pair():
    intensity = u.to_atomic(5.1, "TWcm2", "intensity")
    rabi = u.rabi_from_intensity(intensity, 0.9145)
    assert u.au_to_ev(rabi) == pytest.approx(0.3, rel=1e-3)


def test_intensity_ratio_four_doubles_rabi():
    d = 0.9145
    i1 = u.to_atomic(5.1, "TWcm2", "intensity")
    i2 = u.to_atomic(20.4, "TWcm2", "intensity")
    r1 = u.rabi_from_intensity(i1, d)
    r2 = u.rabi_from_intensity(i2, d)
    assert r2 == pytest.approx(2.0 * r1, rel=1e-12)


def test_zero_intensity_zero_rabi():
    assert u.rabi_from_intensity(0.0, 0.9145) == 0.0


def test_negative_intensity_rejected():
    with pytest.raises(ValueError):
        u.rabi_from_intensity(-1.0, 0.9145)
    with pytest.raises(ValueError):
        u.rabi_from_intensity(1.0, 0.0)


def test_rabi_scales_as_sqrt_intensity():
    rng = np.random.default_rng(42)
    d = 0.9145
    for intensity in rng.uniform(1e-8, 1e-2, size=10):
        expected = d * math.sqrt(intensity)
        assert u.rabi_from_intensity(intensity, d) == pytest.approx(
            expected, rel=1e-14)


def test_rabi_intensity_round_trip():
    rng = np.random.default_rng(1)
    for rabi in rng.uniform(1e-4, 1.0, size=10):
        back = u.rabi_from_intensity(u.intensity_from_rabi(rabi, 0.9145),
                                     0.9145)
        assert back == pytest.approx(rabi, rel=1e-13)


def test_hbar_product_of_scales():
    assert u.HBAR_EVFS == pytest.approx(0.65821, rel=2e-5)
