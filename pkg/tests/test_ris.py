import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from hapsris.channel import HopGain
from hapsris.errors import ConfigurationError
from hapsris.ris import (
    CascadeLink,
    RisArchitecture,
    amplification_factor,
    budget_rho,
    cascade_snr,
    complex_baseband_snr,
    element_gain_dbi,
    elementwise_oracle_snr,
    end_to_end_snr,
)


def hop(linear):
    return HopGain.from_linear(linear)


def test_rho_example():
    # P_A = 2 W, L = 500, 4e-12 W per element, no dynamic noise
    rho = budget_rho(2.0, 500, 4e-12, 0.0)
    assert rho == pytest.approx(31622.7766, rel=1e-9)
    assert 20 * math.log10(rho) == pytest.approx(90.0, abs=1e-9)


def test_rho_floor_for_tiny_budget():
    arch = RisArchitecture.active(10, 100, pa_output_power=1e-30)
    amp = amplification_factor(arch, 1.0, hop(1e-3), 1e-13)
    assert amp.rho == 1.0


def test_rho_unity_when_budget_exactly_met():
    assert budget_rho(2.0, 1, 1.5, 0.5) == pytest.approx(1.0, abs=1e-15)


def test_rho_cap():
    assert budget_rho(2.0, 1, 1e-20, 0.0, cap=100.0) == 100.0


def test_amplification_state_fields():
    arch = RisArchitecture.active(500, 30000, ris_noise_figure=5.0)
    amp = amplification_factor(arch, 10.0, hop(1e-9), 4e-13)
    assert amp.input_power_per_element == pytest.approx(1e-8)
    assert amp.dynamic_noise_power == pytest.approx(4e-13 * 10**0.5)
    assert amp.rho == pytest.approx(math.sqrt(2.0 / (500 * (1e-8 + 4e-13 * 10**0.5))))


def test_amplification_passive_is_contract_violation():
    with pytest.raises(ValueError):
        amplification_factor(RisArchitecture.passive(100), 1.0, hop(1e-3), 1e-13)


def test_passive_snr_example():
    link = CascadeLink(hop(1e-10), hop(1e-10))
    snr = end_to_end_snr(link, RisArchitecture.passive(1000), 1.0, 4e-13)
    assert snr == pytest.approx(0.025, rel=1e-12)


def test_single_scatterer():
    link = CascadeLink(hop(3e-5), hop(7e-6))
    snr = end_to_end_snr(link, RisArchitecture.passive(1), 2.0, 1e-12)
    assert snr == pytest.approx(2.0 * 3e-5 * 7e-6 / 1e-12, rel=1e-12)


def test_dynamic_noise_ceiling_limit():
    p, n, g1, g2, s2, w = 1.0, 64, 1e-9, 1e-8, 1e-12, 1e-13
    ceiling = p * n * g1 / s2
    assert cascade_snr(p, 1e9, n, g1, g2, s2, w) == pytest.approx(ceiling, rel=1e-9)


def test_snr_domain_errors():
    link = CascadeLink(hop(1e-10), hop(1e-10))
    with pytest.raises(ValueError):
        end_to_end_snr(link, RisArchitecture.passive(10), 0.0, 1e-13)
    with pytest.raises(ValueError):
        end_to_end_snr(link, RisArchitecture.passive(10), 1.0, 0.0)


def test_arch_validation_bad():
    with pytest.raises(ConfigurationError):
        RisArchitecture.active(700, 30000)
    with pytest.raises(ConfigurationError):
        RisArchitecture.active(0, 10)
    with pytest.raises(ConfigurationError):
        RisArchitecture.active(5, 10, amp_gain_floor=0.5)
    with pytest.raises(ConfigurationError):
        RisArchitecture.active(5, 10, amp_gain_cap=0.9)
    with pytest.raises(ConfigurationError):
        RisArchitecture.passive(0)


def test_element_gain_default():
    assert element_gain_dbi(0.2) == pytest.approx(-2.987, abs=1e-3)


def test_as_passive_switches_off_amplifiers():
    arch = RisArchitecture.active(500, 30000)
    off = arch.as_passive()
    assert not off.is_active and off.n_total == 30000 and off.num_amplifiers == 0


# --- oracle equivalence ---------------------------------------------------

def test_oracle_matches_closed_form_uniform_single_group():
    g1, g2, p, s2, w = 2e-9, 5e-10, 3.0, 1e-12, 4e-13
    arch = RisArchitecture.active(4, 4)
    amp = amplification_factor(arch, p, hop(g1), s2 / 10**0.5)
    closed = end_to_end_snr(CascadeLink(hop(g1), hop(g2)), arch, p, w, s2 / 10**0.5)
    oracle = elementwise_oracle_snr([math.sqrt(g1)] * 4, [math.sqrt(g2)] * 4, [0] * 4,
                                    [amp.rho], p, amp.dynamic_noise_power, w)
    assert oracle == pytest.approx(closed, rel=1e-12)


def test_oracle_single_element():
    h1, h2 = 1e-4, 3e-3
    assert elementwise_oracle_snr([h1], [h2], [0], [1.0], 2.0, 0.0, 1e-12) == pytest.approx(
        2.0 * h1**2 * h2**2 / 1e-12, rel=1e-12)


def test_oracle_vs_complex_baseband_unequal_amplitudes():
    rng = np.random.default_rng(17)
    h1 = (rng.normal(size=8) + 1j * rng.normal(size=8)) * 1e-4
    h2 = (rng.normal(size=8) + 1j * rng.normal(size=8)) * 1e-5
    groups = [0, 0, 0, 0, 1, 1, 1, 1]
    rho = [12.0, 30.0]
    a = elementwise_oracle_snr(np.abs(h1), np.abs(h2), groups, rho, 1.5, 1e-12, 1e-13)
    b = complex_baseband_snr(h1, h2, groups, rho, 1.5, 1e-12, 1e-13)
    assert a == pytest.approx(b, rel=1e-9)


def test_complex_baseband_phase_alignment_is_optimal():
    rng = np.random.default_rng(3)
    h1 = rng.normal(size=6) + 1j * rng.normal(size=6)
    h2 = rng.normal(size=6) + 1j * rng.normal(size=6)
    best = complex_baseband_snr(h1, h2, [0] * 6, [1.0], 1.0, 0.0, 1.0)
    # any other phase choice can only lose signal power
    for _ in range(200):
        theta = rng.uniform(0, 2 * np.pi, 6)
        snr = abs(np.sum(np.exp(1j * theta) * h1 * h2)) ** 2
        assert snr <= best + 1e-12


def test_oracle_length_mismatch():
    with pytest.raises(ValueError):
        elementwise_oracle_snr([1, 2], [1], [0, 0], [1.0], 1.0, 0.0, 1.0)


# --- properties -----------------------------------------------------------

gains = st.floats(1e-14, 1e-6)


@given(gains, gains, st.floats(1e-3, 1e3), st.integers(1, 5000))
def test_passive_double_fading_scaling(g1, g2, p, n):
    w = 4e-13
    base = cascade_snr(p, 1.0, n, g1, g2, 0.0, w)
    assert cascade_snr(p, 1.0, 2 * n, g1, g2, 0.0, w) == pytest.approx(4 * base, rel=1e-12)
    assert cascade_snr(p, 1.0, n, 3 * g1, 5 * g2, 0.0, w) == pytest.approx(15 * base, rel=1e-12)


def _snr(arch, p, g1, g2, n0b=4e-13):
    return end_to_end_snr(CascadeLink(hop(g1), hop(g2)), arch, p, n0b, n0b)


@given(gains, gains, st.floats(1e-3, 1e3))
def test_grouping_monotonicity(g1, g2, p):
    snrs = [_snr(RisArchitecture.active(L, 30000), p, g1, g2) for L in (500, 1000, 2000)]
    snrs.append(_snr(RisArchitecture.passive(30000), p, g1, g2))
    assert all(a >= b * (1 - 1e-12) for a, b in zip(snrs, snrs[1:]))


@given(gains, gains, st.floats(1e-3, 1e3), st.sampled_from([1, 10, 100, 1000]))
def test_tx_power_monotonicity(g1, g2, p, L):
    arch = RisArchitecture.active(L, 30000)
    lo, hi = _snr(arch, p, g1, g2), _snr(arch, p * 1.5, g1, g2)
    assert hi > lo or hi == pytest.approx(lo, rel=1e-12)
    passive = RisArchitecture.passive(30000)
    assert _snr(passive, p * 1.5, g1, g2) > _snr(passive, p, g1, g2)


@given(gains, gains, st.floats(1e-3, 1e3), st.sampled_from([1, 10, 100, 1000]))
def test_active_ceiling(g1, g2, p, L):
    arch = RisArchitecture.active(L, 30000)
    sigma_v2 = 4e-13 * 10 ** (arch.ris_noise_figure / 10)
    assert _snr(arch, p, g1, g2) <= p * arch.n_total * g1 / sigma_v2 * (1 + 1e-12)


@settings(max_examples=50)
@given(st.integers(1, 8), st.sampled_from([1, 2, 4, 8]), gains, gains, st.floats(0.01, 100))
def test_oracle_equivalence_property(groups, L, g1, g2, p):
    n = groups * L
    arch = RisArchitecture.active(L, n)
    n0b = 4e-13
    closed = _snr(arch, p, g1, g2, n0b)
    amp = amplification_factor(arch, p, hop(g1), n0b)
    oracle = elementwise_oracle_snr(np.full(n, math.sqrt(g1)), np.full(n, math.sqrt(g2)),
                                    np.repeat(np.arange(groups), L), np.full(groups, amp.rho),
                                    p, amp.dynamic_noise_power, n0b)
    assume(closed > 0)
    assert oracle == pytest.approx(closed, rel=1e-9)


def test_passive_has_no_dynamic_noise():
    from hapsris.ris import dynamic_noise_power
    assert dynamic_noise_power(RisArchitecture.passive(10), 1.0) == 0.0
