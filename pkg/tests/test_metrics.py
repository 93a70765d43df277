import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hapsris.errors import ConfigurationError
from hapsris.metrics import (
    CdfSummary,
    FeasibilityParams,
    RisPowerParams,
    empirical_cdf,
    energy_efficiency,
    feasibility_report,
    ris_power_consumption,
    shannon_rate,
)
from hapsris.ris import RisMode

A, P = RisMode.SUB_CONNECTED_ACTIVE, RisMode.PASSIVE
DEFAULT_POWER = RisPowerParams(p_sw=7.8e-3, p_dc=10 ** (-0.5) * 1e-3, p_a=2.0)


@pytest.mark.parametrize("snr, bw, rate", [(1, 1e8, 1e8), (0, 1e8, 0.0), (1023, 1e8, 1e9)])
def test_shannon_examples(snr, bw, rate):
    assert shannon_rate(snr, bw) == pytest.approx(rate, rel=1e-12, abs=0)


def test_shannon_domain():
    with pytest.raises(ValueError):
        shannon_rate(-0.1, 1e8)
    with pytest.raises(ValueError):
        shannon_rate(1.0, 0)


@given(st.floats(0, 1e9), st.floats(0, 1e9))
def test_shannon_increasing(a, b):
    if a < b:
        assert shannon_rate(a, 1e8) <= shannon_rate(b, 1e8)
    if b - a > 1e-6 * max(1.0, a):
        assert shannon_rate(a, 1e8) < shannon_rate(b, 1e8)


@given(st.floats(0, 1e6))
def test_one_db_gain_bounded(snr):
    bound = 1e8 * math.log2(10**0.1)
    gain = shannon_rate(snr * 10**0.1, 1e8) - shannon_rate(snr, 1e8)
    assert gain <= bound * (1 + 1e-12)
    assert bound == pytest.approx(33.22e6, abs=0.01e6)


def test_one_db_gain_approaches_bound():
    bound = 1e8 * math.log2(10**0.1)
    gain = shannon_rate(1e12 * 10**0.1, 1e8) - shannon_rate(1e12, 1e8)
    assert gain == pytest.approx(bound, rel=1e-6)


def test_shannon_concave():
    s = np.linspace(0, 100, 1001)
    assert np.all(np.diff(shannon_rate(s, 1e8), 2) < 0)


def test_power_active_l500():
    p = ris_power_consumption(30000, A, 500, DEFAULT_POWER)
    assert p == pytest.approx(234 + 9.4868 + 120, abs=1e-3)
    assert round(p, 2) == 363.49
    assert abs(p - 364) < 1.0


def test_power_passive_and_l2000():
    assert ris_power_consumption(30000, P, None, DEFAULT_POWER) == pytest.approx(243.4868, abs=1e-3)
    assert ris_power_consumption(30000, A, 2000, DEFAULT_POWER) == pytest.approx(273.4868, abs=1e-3)


def test_power_non_divisible():
    with pytest.raises(ConfigurationError):
        ris_power_consumption(30000, A, 700, DEFAULT_POWER)


@given(st.sampled_from([1, 2, 3, 5, 10, 100, 500, 1000, 1500, 2000, 3000, 30000]),
       st.sampled_from([1, 2, 3, 5, 10, 100, 500, 1000, 1500, 2000, 3000, 30000]))
def test_power_non_increasing_in_L(l1, l2):
    if l1 < l2:
        assert ris_power_consumption(30000, A, l1, DEFAULT_POWER) >= ris_power_consumption(30000, A, l2, DEFAULT_POWER)
    assert ris_power_consumption(30000, P, None, DEFAULT_POWER) <= ris_power_consumption(30000, A, l1, DEFAULT_POWER)


def test_energy_efficiency():
    assert energy_efficiency(70e6, 10.0, 243.49) == pytest.approx(2.7614e5, rel=1e-4)
    assert energy_efficiency(0.0, 10.0, 243.49) == 0.0
    with pytest.raises(ValueError):
        energy_efficiency(1.0, 0.0, 0.0)


@given(st.floats(0, 1e10), st.floats(1e-3, 1e3), st.floats(0, 1e3))
def test_energy_efficiency_identity(rate, tx, ris):
    assert energy_efficiency(rate, tx, ris) * (tx + ris) == pytest.approx(rate, rel=1e-12, abs=1e-9)


def test_feasibility_numbers():
    rep = feasibility_report(30000, 2.4, 0.2, 363.49, FeasibilityParams())
    assert rep.mass_kg == pytest.approx(300.0, abs=1e-9)
    assert rep.area_m2 == pytest.approx(18.72, abs=0.01)
    assert rep.solar_area_m2 == pytest.approx(0.990, abs=1e-3)


def test_feasibility_scaling():
    base = feasibility_report(1000, 2.4, 0.2, 1.0).area_m2
    assert feasibility_report(2000, 2.4, 0.2, 1.0).area_m2 == pytest.approx(2 * base)
    # half the frequency doubles lambda
    assert feasibility_report(1000, 1.2, 0.2, 1.0).area_m2 == pytest.approx(4 * base)


def test_feasibility_quoted_area_at_two_ghz():
    assert feasibility_report(30000, 2.0, 0.2, 1.0).area_m2 == pytest.approx(27.0, abs=0.05)


def test_cdf_examples():
    assert empirical_cdf([1, 2, 3, 4]).evaluate(2) == 0.5
    one = empirical_cdf([5])
    assert (one.evaluate(4.9), one.evaluate(5)) == (0.0, 1.0)
    assert empirical_cdf([10, 20, 30]).percentile(0.5) == 20


def test_cdf_errors():
    with pytest.raises(ValueError):
        empirical_cdf([])
    with pytest.raises(ValueError):
        empirical_cdf([1.0, float("nan")])


def test_cdf_immutable():
    c = CdfSummary([3, 1, 2])
    with pytest.raises(ValueError):
        c.sorted_values[0] = 9


def _brute_percentile(values, p):
    n = len(values)
    return min(v for v in values if sum(u <= v for u in values) / n >= p)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=40), st.floats(0, 1))
def test_percentile_matches_definition(values, p):
    assert CdfSummary(values).percentile(p) == _brute_percentile(values, p)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
def test_cdf_properties(values):
    c = CdfSummary(values)
    xs = np.linspace(min(values) - 1, max(values) + 1, 50)
    F = c.evaluate(xs)
    assert np.all(np.diff(F) >= 0)
    assert F[0] == 0.0 and F[-1] == 1.0
    assert c.evaluate(max(values)) == 1.0
    assert min(values) <= c.percentile(0.5) <= max(values)
