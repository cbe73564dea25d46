#!/usr/bin/env python3
"""
Tests for the bivariate and m-variate nu-BS models
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats

import nubs_multivariate as mv
import nubs_univariate as uni
from normal_kernel import CorrelationMatrix, biv_normal_cdf
from nubs_errors import DomainError
from nubs_multivariate import BivNuBsParams, MultiNuBsParams
from nubs_univariate import NuBsParams

FAST_SETS = [
    BivNuBsParams(NuBsParams(0.5, 1.0, 0.5), NuBsParams(0.8, 2.0, 0.5), 0.4),
    BivNuBsParams(NuBsParams(1.2, 3.0, 1.5), NuBsParams(0.3, 0.5, 0.75), -0.7),
]

SLOW_SETS = FAST_SETS + [
    BivNuBsParams(NuBsParams(0.2, 1.0, 0.25), NuBsParams(0.2, 1.0, 0.25), 0.0),
    BivNuBsParams(NuBsParams(1.0, 1.0, 1.0), NuBsParams(2.0, 4.0, 2.0), 0.9),
    BivNuBsParams(NuBsParams(0.7, 10.0, 0.5), NuBsParams(0.7, 0.1, 0.5), -0.3),
    BivNuBsParams(NuBsParams(2.0, 1.0, 0.5), NuBsParams(1.5, 1.0, 3.0), 0.6),
    BivNuBsParams(NuBsParams(0.4, 5.0, 2.0), NuBsParams(0.9, 2.0, 0.4), -0.95),
    BivNuBsParams(NuBsParams(1.0, 0.3, 0.6), NuBsParams(0.6, 7.0, 1.2), 0.2),
    BivNuBsParams(NuBsParams(0.15, 131.8, 0.5), NuBsParams(0.15, 131.8, 0.5), 0.8),
    BivNuBsParams(NuBsParams(2.5, 2.0, 1.0), NuBsParams(0.5, 2.0, 1.0), -0.5),
    BivNuBsParams(NuBsParams(0.9, 1.0, 0.3), NuBsParams(1.1, 1.0, 0.3), 0.95),
    BivNuBsParams(NuBsParams(0.3, 2.0, 4.0), NuBsParams(1.3, 0.7, 0.8), 0.1),
]


def _log_range(params: NuBsParams, tail: float):
    return (math.log(uni.quantile(tail, params)), math.log(uni.quantile(1.0 - tail, params)))


def _total_mass(params: BivNuBsParams) -> float:
    """Joint density integrated on the log scale between extreme quantiles."""
    x_lo, x_hi = _log_range(params.p1, 1e-10)
    y_lo, y_hi = _log_range(params.p2, 1e-10)
    mass, _ = integrate.dblquad(
        lambda y, x: mv.biv_pdf(math.exp(x), math.exp(y), params) * math.exp(x + y),
        x_lo, x_hi, y_lo, y_hi, epsabs=1e-11, epsrel=1e-9,
    )
    return mass


def _marginal_by_quadrature(t1: float, params: BivNuBsParams) -> float:
    lo, hi = _log_range(params.p2, 1e-13)
    value, _ = integrate.quad(
        lambda y: mv.biv_pdf(t1, math.exp(y), params) * math.exp(y),
        lo, hi, epsabs=1e-14, epsrel=1e-10, limit=400,
    )
    return value


def test_params_validation_and_tuple_form():
    p1 = NuBsParams(0.5, 1.0, 0.5)
    with pytest.raises(DomainError):
        BivNuBsParams(p1, p1, 1.0)
    with pytest.raises(DomainError):
        BivNuBsParams(p1, p1, math.nan)
    params = BivNuBsParams.from_tuple((0.5, 1.0, 0.5, 0.8, 2.0, 0.7, -0.2))
    assert params.as_tuple() == (0.5, 1.0, 0.5, 0.8, 2.0, 0.7, -0.2)
    assert params.component(2) == NuBsParams(0.8, 2.0, 0.7)
    with pytest.raises(DomainError):
        BivNuBsParams.from_tuple((0.5, 1.0, 0.5))
    with pytest.raises(DomainError):
        params.component(3)


@pytest.mark.parametrize("rho", [-0.9, -0.3, 0.0, 0.5, 0.95])
def test_cdf_at_medians(rho):
    params = BivNuBsParams(NuBsParams(0.7, 3.0, 0.6), NuBsParams(1.4, 0.2, 2.0), rho)
    expected = 0.25 + math.asin(rho) / (2.0 * math.pi)
    assert mv.biv_cdf(3.0, 0.2, params) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("params", FAST_SETS)
def test_density_integrates_to_one(params):
    assert _total_mass(params) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("params", SLOW_SETS)
def test_density_integrates_to_one_wide_grid(params):
    assert _total_mass(params) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("params", FAST_SETS)
@pytest.mark.parametrize("prob", [0.1, 0.5, 0.9])
def test_marginal_integrates_to_univariate_density(params, prob):
    t1 = uni.quantile(prob, params.p1)
    expected = uni.pdf(t1, params.p1)
    assert _marginal_by_quadrature(t1, params) == pytest.approx(expected, rel=1e-7)
    assert mv.biv_marginal_pdf(1, t1, params) == expected


@pytest.mark.slow
@pytest.mark.parametrize("params", SLOW_SETS)
@pytest.mark.parametrize("prob", [0.001, 0.05, 0.5, 0.95, 0.999])
def test_marginal_integrates_to_univariate_density_wide_grid(params, prob):
    t1 = uni.quantile(prob, params.p1)
    assert _marginal_by_quadrature(t1, params) == pytest.approx(uni.pdf(t1, params.p1), rel=1e-6)


def test_independence_factorizes():
    p1 = NuBsParams(0.6, 2.0, 0.8)
    p2 = NuBsParams(1.1, 0.5, 1.7)
    params = BivNuBsParams(p1, p2, 0.0)
    t1 = np.array([0.4, 1.0, 2.0, 9.0])
    t2 = np.array([0.05, 0.5, 0.6, 3.0])
    np.testing.assert_allclose(mv.biv_pdf(t1, t2, params), uni.pdf(t1, p1) * uni.pdf(t2, p2), rtol=1e-12)
    np.testing.assert_allclose(mv.biv_cdf(t1, t2, params), uni.cdf(t1, p1) * uni.cdf(t2, p2), atol=1e-14)


def test_second_marginal_density():
    params = FAST_SETS[1]
    t = np.array([0.2, 0.5, 1.4])
    np.testing.assert_array_equal(mv.biv_marginal_pdf(2, t, params), uni.pdf(t, params.p2))
    with pytest.raises(DomainError):
        mv.biv_marginal_pdf(0, t, params)


def test_nonpositive_coordinates_rejected():
    params = FAST_SETS[0]
    with pytest.raises(DomainError):
        mv.biv_pdf(1.0, 0.0, params)
    with pytest.raises(DomainError):
        mv.biv_cdf(-1.0, 1.0, params)


def test_sample_shape_margins_and_latent_correlation():
    params = BivNuBsParams(NuBsParams(0.5, 2.0, 0.75), NuBsParams(1.0, 5.0, 1.5), 0.6)
    draws = mv.biv_sample(params, 20000, seed=17)
    assert draws.shape == (20000, 2)
    assert np.all(draws > 0.0)
    assert np.array_equal(draws, mv.biv_sample(params, 20000, seed=17))
    # medians of each column sit at beta_i
    assert np.median(draws[:, 0]) == pytest.approx(2.0, rel=0.02)
    assert np.median(draws[:, 1]) == pytest.approx(5.0, rel=0.04)
    # sampling sd of r near 0.6 with n = 20000 is about 0.0045
    assert mv.biv_latent_correlation(draws, params) == pytest.approx(0.6, abs=0.025)


def test_latent_correlation_shape_check():
    with pytest.raises(DomainError):
        mv.biv_latent_correlation(np.ones((10, 3)), FAST_SETS[0])


def test_reciprocal_modes_flip_rho():
    params = BivNuBsParams(NuBsParams(0.5, 4.0, 0.8), NuBsParams(1.2, 0.5, 1.5), 0.45)
    both = mv.biv_reciprocal_params("both", params)
    first = mv.biv_reciprocal_params("first", params)
    second = mv.biv_reciprocal_params("second", params)
    assert both.as_tuple() == (0.5, 0.25, 0.8, 1.2, 2.0, 1.5, 0.45)
    assert first.as_tuple() == (0.5, 0.25, 0.8, 1.2, 0.5, 1.5, -0.45)
    assert second.as_tuple() == (0.5, 4.0, 0.8, 1.2, 2.0, 1.5, -0.45)
    with pytest.raises(DomainError):
        mv.biv_reciprocal_params("neither", params)


def test_reciprocal_first_cdf_identity():
    """P(1/T1 <= s1, T2 <= s2) = F2(s2) - F(1/s1, s2)."""
    params = BivNuBsParams(NuBsParams(0.5, 4.0, 0.8), NuBsParams(1.2, 0.5, 1.5), 0.45)
    recip = mv.biv_reciprocal_params("first", params)
    s1 = np.array([0.1, 0.25, 0.9])
    s2 = np.array([0.3, 0.5, 2.0])
    expected = uni.cdf(s2, params.p2) - mv.biv_cdf(1.0 / s1, s2, params)
    np.testing.assert_allclose(mv.biv_cdf(s1, s2, recip), expected, atol=1e-12)


def test_reciprocal_both_cdf_identity():
    """P(1/T1 <= s1, 1/T2 <= s2) = 1 - F1(1/s1) - F2(1/s2) + F(1/s1, 1/s2)."""
    params = BivNuBsParams(NuBsParams(0.5, 4.0, 0.8), NuBsParams(1.2, 0.5, 1.5), -0.3)
    recip = mv.biv_reciprocal_params("both", params)
    s1 = np.array([0.1, 0.25, 0.9])
    s2 = np.array([0.3, 2.0, 5.0])
    expected = (
        1.0
        - uni.cdf(1.0 / s1, params.p1)
        - uni.cdf(1.0 / s2, params.p2)
        + mv.biv_cdf(1.0 / s1, 1.0 / s2, params)
    )
    np.testing.assert_allclose(mv.biv_cdf(s1, s2, recip), expected, atol=1e-12)


def _multi(alphas, betas, nu, gamma):
    return MultiNuBsParams(np.array(alphas), np.array(betas), nu, gamma)


def test_multivariate_dimension_one_is_univariate():
    params = _multi([0.7], [2.0], 1.3, CorrelationMatrix.identity(1))
    t = np.array([[0.5], [2.0], [6.0]])
    marginal = NuBsParams(0.7, 2.0, 1.3)
    np.testing.assert_allclose(mv.multi_pdf(t, params), uni.pdf(t[:, 0], marginal), rtol=1e-12)
    estimate, std_error = mv.multi_cdf([3.0], params, 100000, seed=4)
    assert abs(estimate - uni.cdf(3.0, marginal)) <= 4.0 * std_error


def test_multivariate_dimension_two_matches_bivariate():
    biv = BivNuBsParams(NuBsParams(0.6, 2.0, 0.9), NuBsParams(1.3, 0.4, 0.9), -0.55)
    params = mv.multi_from_bivariate(biv)
    assert params.dim == 2
    points = np.array([[1.0, 0.2], [2.0, 0.4], [5.0, 1.5]])
    np.testing.assert_allclose(
        mv.multi_pdf(points, params), mv.biv_pdf(points[:, 0], points[:, 1], biv), rtol=1e-12
    )
    estimate, std_error = mv.multi_cdf([2.5, 0.6], params, 200000, seed=8)
    assert abs(estimate - mv.biv_cdf(2.5, 0.6, biv)) <= 4.0 * std_error


def test_multivariate_sample_and_marginals():
    gamma = CorrelationMatrix.equicorrelated(3, 0.4)
    params = _multi([0.5, 1.0, 1.5], [1.0, 2.0, 3.0], 0.75, gamma)
    draws = mv.multi_sample(params, 5000, seed=21)
    assert draws.shape == (5000, 3)
    assert np.all(draws > 0.0)
    np.testing.assert_allclose(np.median(draws, axis=0), [1.0, 2.0, 3.0], rtol=0.08)
    assert mv.multi_marginal_params(1, params) == NuBsParams(1.0, 2.0, 0.75)
    with pytest.raises(DomainError):
        mv.multi_marginal_params(3, params)
    with pytest.raises(DomainError):
        mv.multi_marginal_params(-1, params)


def test_multivariate_latent_marginal_matches_normal_kernel():
    """With m = 3, P(T1 <= t1, T2 <= t2, T3 <= inf-like) reduces to the bivariate kernel."""
    gamma = CorrelationMatrix(np.array([
        [1.0, 0.3, 0.1],
        [0.3, 1.0, -0.2],
        [0.1, -0.2, 1.0],
    ]))
    params = _multi([0.5, 0.8, 0.4], [1.0, 1.0, 1.0], 0.5, gamma)
    far = uni.quantile(1.0 - 1e-15, params.marginal(2))
    estimate, std_error = mv.multi_cdf([1.5, 0.8, far], params, 200000, seed=13)
    u = uni.latent_score(1.5, params.marginal(0))
    v = uni.latent_score(0.8, params.marginal(1))
    assert abs(estimate - biv_normal_cdf(u, v, 0.3)) <= 4.0 * std_error + 1e-12


def test_multivariate_validation():
    with pytest.raises(DomainError):
        _multi([0.5, 0.5], [1.0], 0.5, CorrelationMatrix.identity(2))
    with pytest.raises(DomainError):
        _multi([0.5, 0.5], [1.0, 1.0], 0.5, CorrelationMatrix.identity(3))
    with pytest.raises(DomainError):
        _multi([0.5, -0.5], [1.0, 1.0], 0.5, CorrelationMatrix.identity(2))
    with pytest.raises(DomainError):
        mv.multi_from_bivariate(
            BivNuBsParams(NuBsParams(0.5, 1.0, 0.5), NuBsParams(0.5, 1.0, 0.6), 0.1)
        )
    params = _multi([0.5, 0.5], [1.0, 1.0], 0.5, CorrelationMatrix.identity(2))
    with pytest.raises(DomainError):
        mv.multi_pdf(np.array([1.0, 1.0, 1.0]), params)
    with pytest.raises(DomainError):
        mv.multi_pdf(np.array([1.0, 0.0]), params)


def _ks_distance(values: np.ndarray, params: NuBsParams) -> float:
    return float(stats.kstest(values, lambda x: uni.cdf(x, params)).statistic)


@pytest.mark.parametrize("params", FAST_SETS)
def test_cdf_assigns_nonnegative_mass_to_rectangles(params):
    rng = np.random.default_rng(99)
    x = np.sort(uni.quantile(rng.uniform(1e-4, 1.0 - 1e-4, (1000, 2)), params.p1), axis=1)
    y = np.sort(uni.quantile(rng.uniform(1e-4, 1.0 - 1e-4, (1000, 2)), params.p2), axis=1)
    mass = (
        mv.biv_cdf(x[:, 1], y[:, 1], params)
        - mv.biv_cdf(x[:, 0], y[:, 1], params)
        - mv.biv_cdf(x[:, 1], y[:, 0], params)
        + mv.biv_cdf(x[:, 0], y[:, 0], params)
    )
    assert np.all(mass >= -1e-12)


@pytest.mark.parametrize("params", FAST_SETS)
def test_cdf_with_far_second_coordinate_is_first_marginal(params):
    t1 = uni.quantile(np.array([0.01, 0.2, 0.5, 0.8, 0.99]), params.p1)
    far = 1e6 * params.p2.beta
    np.testing.assert_allclose(mv.biv_cdf(t1, far, params), uni.cdf(t1, params.p1), atol=1e-7)


def test_sample_columns_follow_their_margins():
    params = BivNuBsParams(NuBsParams(0.5, 2.0, 0.75), NuBsParams(1.0, 5.0, 1.5), 0.6)
    draws = mv.biv_sample(params, 20000, seed=5)
    bound = 1.63 / math.sqrt(20000)
    assert _ks_distance(draws[:, 0], params.p1) < bound
    assert _ks_distance(draws[:, 1], params.p2) < bound


def test_uncorrelated_sample_has_no_latent_correlation():
    params = BivNuBsParams(NuBsParams(0.5, 2.0, 0.75), NuBsParams(1.0, 5.0, 1.5), 0.0)
    draws = mv.biv_sample(params, 20000, seed=23)
    assert abs(mv.biv_latent_correlation(draws, params)) < 3.0 / math.sqrt(20000)


@pytest.mark.parametrize("mode,column", [("first", 0), ("second", 1)])
def test_reciprocated_coordinate_reverses_latent_correlation(mode, column):
    params = BivNuBsParams(NuBsParams(0.5, 2.0, 0.75), NuBsParams(1.0, 5.0, 1.5), 0.6)
    recip = mv.biv_reciprocal_params(mode, params)
    draws = mv.biv_sample(params, 20000, seed=31)
    draws[:, column] = 1.0 / draws[:, column]
    assert _ks_distance(draws[:, column], recip.component(column + 1)) < 1.63 / math.sqrt(20000)
    assert mv.biv_latent_correlation(draws, recip) == pytest.approx(-0.6, abs=3.0 / math.sqrt(20000))


def test_empirical_cdf_matches_analytic_on_grid():
    params = BivNuBsParams(NuBsParams(0.6, 1.5, 0.8), NuBsParams(1.1, 3.0, 1.2), -0.4)
    draws = mv.biv_sample(params, 50000, seed=47)
    probs = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    for a in uni.quantile(probs, params.p1):
        for b in uni.quantile(probs, params.p2):
            empirical = float(np.mean((draws[:, 0] <= a) & (draws[:, 1] <= b)))
            assert empirical == pytest.approx(mv.biv_cdf(a, b, params), abs=0.01)


def test_multivariate_sample_margins_and_latent_correlation():
    entries = np.array([
        [1.0, 0.5, -0.3],
        [0.5, 1.0, 0.2],
        [-0.3, 0.2, 1.0],
    ])
    params = _multi([0.5, 1.0, 1.5], [1.0, 2.0, 3.0], 0.75, CorrelationMatrix(entries))
    n = 20000
    draws = mv.multi_sample(params, n, seed=61)
    latent = np.empty_like(draws)
    for i in range(3):
        assert _ks_distance(draws[:, i], params.marginal(i)) < 1.63 / math.sqrt(n)
        latent[:, i] = uni.latent_score(draws[:, i], params.marginal(i))
    assert np.max(np.abs(np.corrcoef(latent, rowvar=False) - entries)) < 3.0 / math.sqrt(n)


def test_multivariate_cdf_of_independent_medians():
    params = _multi([0.5, 1.0, 2.0], [1.0, 4.0, 0.3], 0.6, CorrelationMatrix.identity(3))
    estimate, std_error = mv.multi_cdf(params.betas, params, 100000, seed=9)
    assert abs(estimate - 0.125) <= 4.0 * std_error


def test_multivariate_independent_density_factorizes():
    params = _multi([0.5, 1.0, 2.0], [1.0, 4.0, 0.3], 0.6, CorrelationMatrix.identity(3))
    points = np.array([[0.5, 4.0, 0.1], [1.0, 2.0, 0.3], [2.5, 9.0, 1.7]])
    expected = np.prod([uni.pdf(points[:, i], params.marginal(i)) for i in range(3)], axis=0)
    np.testing.assert_allclose(mv.multi_pdf(points, params), expected, rtol=1e-12)
