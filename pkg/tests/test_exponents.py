import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wiretap import exponents
from wiretap.channels import BEC, BSC, DMC, mutual_information, noiseless, secrecy_capacity
from wiretap.exponents import LN2

U = np.array([0.5, 0.5])


def mp_e0_bsc(p, rho):
    """Closed form for the BSC with uniform input, in nats, at 30 digits."""
    mpmath.mp.dps = 30
    p, rho = mpmath.mpf(p), mpmath.mpf(rho)
    s = 1 / (1 + rho)
    return float(rho * mpmath.log(2) - (1 + rho) * mpmath.log(p**s + (1 - p) ** s))


def test_e0_examples():
    assert exponents.gallager_e0(noiseless(), U, 0.7) == pytest.approx(0.7 * LN2, abs=1e-15)
    for c in (BSC(0.1), BEC(0.3), DMC([[0.6, 0.4], [0.1, 0.9]])):
        assert exponents.gallager_e0(c, U, 0.0) == 0.0
    assert exponents.gallager_e0(BSC(0.1), U, 1.0) / LN2 == pytest.approx(0.3219, abs=1e-4)
    for rho in (0.1, 0.5, 1.0):
        assert exponents.gallager_e0(BSC(0.1), U, rho) == pytest.approx(mp_e0_bsc(0.1, rho), abs=1e-13)
    # BEC: E0 = -ln(eps + (1 - eps) 2^-rho)
    assert exponents.gallager_e0(BEC(0.3), U, 1.0) == pytest.approx(-math.log(0.3 + 0.7 / 2), abs=1e-14)


def test_input_distribution_validated():
    with pytest.raises(ValueError):
        exponents.gallager_e0(BSC(0.1), [0.6, 0.6], 0.5)
    with pytest.raises(ValueError):
        exponents.gallager_e0(BSC(0.1), [1.0], 0.5)
    with pytest.raises(ValueError):
        exponents.random_coding_exponent(BSC(0.1), -0.1)


@pytest.mark.parametrize("c", [BSC(0.1), BEC(0.3), DMC([[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]])])
def test_e0_concave_nondecreasing(c):
    q = np.full(c.transition.shape[0], 1 / c.transition.shape[0])
    grid = np.linspace(0, 1, 41)
    values = np.array([exponents.gallager_e0(c, q, r) for r in grid])
    assert np.all(np.diff(values) >= -1e-15)
    assert np.all(values[:-2] - 2 * values[1:-1] + values[2:] <= 1e-12)


@pytest.mark.parametrize("c", [BSC(0.1), BEC(0.3), DMC([[0.8, 0.2], [0.3, 0.7]])])
def test_slope_at_zero_is_mutual_information(c):
    for q in (U, np.array([0.3, 0.7])):
        slope = exponents.e0_slope_at_zero(c, q)
        assert abs(slope - mutual_information(q, c) * LN2) <= 1e-5


@pytest.mark.parametrize("c", [BSC(0.1), BEC(0.3)])
def test_exponent_vanishes_at_capacity(c):
    assert abs(exponents.random_coding_exponent(c, c.capacity() * LN2).exponent) <= 1e-4


def test_exponent_at_zero_rate_and_below_capacity():
    c = BSC(0.1)
    zero = exponents.random_coding_exponent(c, 0.0)
    assert zero.exponent == pytest.approx(exponents.gallager_e0(c, U, 1.0), abs=1e-12)
    assert zero.rho == 1.0
    assert exponents.random_coding_exponent(c, 0.9 * c.capacity() * LN2).exponent > 0


def test_exponent_convex_nonincreasing_in_rate():
    c = BSC(0.1)
    rates = np.linspace(0, c.capacity() * LN2, 25)
    values = np.array([exponents.random_coding_exponent(c, r).exponent for r in rates])
    assert np.all(np.diff(values) <= 1e-9)
    assert np.all(values[:-2] - 2 * values[1:-1] + values[2:] >= -1e-7)


@given(st.floats(0, 0.4))
def test_exponent_positive_below_capacity(frac):
    c = BEC(0.3)
    assert exponents.random_coding_exponent(c, frac * c.capacity() * LN2).exponent > 0


def test_asymmetric_channel_uses_input_search():
    z = DMC([[1.0, 0.0], [0.4, 0.6]])
    res = exponents.random_coding_exponent(z, 0.2)
    scan = max(exponents.exponent_for_input(z, 0.2, [q, 1 - q]).exponent for q in np.linspace(0.01, 0.99, 981))
    assert res.exponent >= scan - 1e-9
    assert res.exponent > exponents.exponent_for_input(z, 0.2, U).exponent
    assert res.q[0] == pytest.approx(0.543, abs=2e-3)


def test_golden_section_on_known_function():
    x, v = exponents.golden_section_max(lambda t: -(t - 0.3) ** 2, 0, 1, 1e-9)
    assert x == pytest.approx(0.3, abs=1e-6) and v == pytest.approx(0, abs=1e-12)
    x, _ = exponents.golden_section_max(lambda t: t, 0, 1)
    assert x == 1


# -- two-channel bound -----------------------------------------------------


@pytest.mark.parametrize("main, wire", [(BSC(0.05), BSC(0.2)), (BEC(0.1), BEC(0.5)), (noiseless(), BSC(0.11))])
def test_symmetric_frontier_is_secrecy_capacity(main, wire):
    r = exponents.ensemble_bound_report(main, wire, 0.3 * LN2, 0.1 * LN2, 500)
    assert np.allclose(r.q, 0.5)
    assert abs(r.frontier_bits - secrecy_capacity(main, wire)) <= 1e-6


def test_log_bound_scales_with_length():
    logs = {}
    for n in (1000, 2000, 4000):
        r = exponents.ensemble_bound_report(BSC(0.05), BSC(0.2), 0.6 * LN2, 0.25 * LN2, n)
        worst = -n * min(r.e_main, r.e_wiretap)
        assert worst <= r.log_bound <= worst + math.log(2)
        logs[n] = r.log_bound
    assert logs[2000] / logs[1000] == pytest.approx(2.0, rel=5e-3)
    assert logs[4000] / logs[2000] == pytest.approx(2.0, rel=5e-3)


def test_example_bound_is_finite():
    r = exponents.ensemble_bound_report(BSC(0.05), BSC(0.2), 0.6 * LN2, 0.25 * LN2, 1000)
    assert np.isfinite(r.log_bound) and 0 < r.bound < 1
    assert r.e_main > 0 and r.e_wiretap > 0
    assert r.r1_achievable
    assert r.log_bound == pytest.approx(np.logaddexp(-1000 * r.e_main, -1000 * r.e_wiretap))
