import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twophoton.noise import NoiseAveragingError, average_over_noise, gauss_hermite_rule
from twophoton.types import NoiseParams


def test_two_point_rule():
    rule = gauss_hermite_rule(2)
    assert np.allclose(rule.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)
    assert np.allclose(rule.weights, [math.sqrt(math.pi) / 2] * 2, atol=1e-15)


@pytest.mark.parametrize("order", [3, 10, 40, 64, 96, 150, 200])
def test_rule_matches_numpy_and_is_normalized(order):
    rule = gauss_hermite_rule(order)
    x, w = np.polynomial.hermite.hermgauss(order)
    assert rule.order == order
    assert np.allclose(rule.nodes, -rule.nodes[::-1], atol=0)
    assert abs(rule.weights.sum() - math.sqrt(math.pi)) <= 1e-13
    if order <= 150:
        assert np.allclose(rule.nodes, x, rtol=1e-12, atol=1e-13)
        assert np.allclose(rule.weights, w, rtol=1e-9, atol=1e-300)


@pytest.mark.parametrize("order", [3, 5, 12])
def test_fourth_moment(order):
    rule = gauss_hermite_rule(order)
    assert np.dot(rule.weights, rule.nodes**4) == pytest.approx(3 * math.sqrt(math.pi) / 4,
                                                                 rel=1e-14)


@pytest.mark.parametrize("order", [4, 16, 64])
def test_exact_up_to_degree_2n_minus_1(order):
    rule = gauss_hermite_rule(order)
    for k in range(0, 2 * order, 2):
        exact = math.gamma((k + 1) / 2)  # integral of x^k e^{-x^2}
        got = math.fsum(rule.weights * rule.nodes**k)
        assert got == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("order", [0, 1, 201, 2.5])
def test_order_out_of_range(order):
    with pytest.raises(ValueError):
        gauss_hermite_rule(order)


@given(eta=st.floats(0, 3), theta=st.floats(0, 2))
@settings(max_examples=30)
def test_constant_function_averages_to_one(eta, theta):
    assert average_over_noise(lambda e, t: 1.0, NoiseParams(eta, theta)) == pytest.approx(1.0,
                                                                                          rel=1e-14)


@given(w=st.floats(0.1, 3.0), tau=st.floats(-5, 5), eta=st.floats(0, 3), theta=st.floats(0, 2))
@settings(max_examples=50)
def test_gaussian_characteristic_function(w, tau, eta, theta):
    got = average_over_noise(lambda e, t: np.cos(w * (tau - e)), NoiseParams(eta, theta))
    assert got == pytest.approx(math.exp(-(w * eta) ** 2 / 2) * math.cos(w * tau), abs=1e-10)


@given(tau=st.floats(-5, 5), eta=st.floats(0, 3), theta=st.floats(0, 1.5))
@settings(max_examples=50)
def test_fringe_with_constant_phase(tau, eta, theta):
    got = average_over_noise(lambda e, t: np.cos(tau - e + 2 * t), NoiseParams(eta, theta))
    expect = math.exp(-2 * theta**2 - eta**2 / 2) * math.cos(tau)
    assert got == pytest.approx(expect, abs=1e-10)


def test_orders_40_and_80_agree_on_fringe():
    noise = NoiseParams(3.0, 1.0)

    def f(e, t):
        return np.exp(-2e-4 * (5.0 - e) ** 2) * np.cos(5.0 - e + 2 * t)

    assert abs(average_over_noise(f, noise, 40) - average_over_noise(f, noise, 80)) <= 1e-10


def test_zero_noise_collapses_exactly():
    def f(e, t):
        return np.cos(0.3 + e) * np.exp(t) + 1.0 / 3.0

    assert average_over_noise(f, NoiseParams()) == f(0.0, 0.0)


def test_leading_axes_kept():
    out = average_over_noise(lambda e, t: np.stack([np.ones_like(e), e**2]), NoiseParams(0.5, 0))
    assert out.shape == (2,)
    assert out[1] == pytest.approx(0.25, rel=1e-13)


def test_non_finite_sample_names_node():
    with pytest.raises(NoiseAveragingError, match="eps"):
        average_over_noise(lambda e, t: np.where(e > 0.5, np.inf, 1.0), NoiseParams(1.0, 0.0))
