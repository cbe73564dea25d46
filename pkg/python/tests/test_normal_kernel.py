#!/usr/bin/env python3
"""
Tests for the standard normal kernels
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from normal_kernel import (
    CorrelationMatrix,
    biv_normal_cdf,
    mvn_cdf_mc,
    mvn_log_pdf,
    mvn_pdf,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
)
from nubs_errors import DomainError, NotPositiveDefiniteError


def _biv_by_quadrature(u: float, v: float, rho: float) -> float:
    """Phi_2(u, v; rho) = integral over x < u of phi(x) Phi((v - rho x) / sqrt(1 - rho^2))."""
    scale = math.sqrt(1.0 - rho * rho)
    value, _ = integrate.quad(
        lambda x: stats.norm.pdf(x) * stats.norm.cdf((v - rho * x) / scale),
        -np.inf, u, epsabs=1e-13, epsrel=1e-12, limit=200,
    )
    return value


def test_univariate_kernels():
    """Density, cdf and quantile at reference points."""
    assert std_normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-15)
    assert std_normal_cdf(0.0) == 0.5
    assert std_normal_cdf(math.inf) == 1.0
    assert std_normal_cdf(-math.inf) == 0.0
    assert std_normal_quantile(0.975) == pytest.approx(1.959963984540054, rel=1e-14)
    assert std_normal_quantile(0.5) == 0.0


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_quantile_outside_open_interval(p):
    with pytest.raises(DomainError):
        std_normal_quantile(p)


@pytest.mark.parametrize("rho", [-0.99, -0.95, -0.5, 0.0, 0.3, 0.8, 0.93, 0.999])
def test_bivariate_orthant_at_origin(rho):
    """Phi_2(0, 0; rho) = 1/4 + asin(rho) / (2 pi), including the |rho| >= 0.925 branch."""
    expected = 0.25 + math.asin(rho) / (2.0 * math.pi)
    assert biv_normal_cdf(0.0, 0.0, rho) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("rho", [-0.97, -0.6, -0.1, 0.2, 0.5, 0.9, 0.96])
@pytest.mark.parametrize("u,v", [(-1.3, 0.4), (0.7, 2.1), (-2.5, -1.8), (1.9, -0.3)])
def test_bivariate_against_quadrature(u, v, rho):
    assert biv_normal_cdf(u, v, rho) == pytest.approx(_biv_by_quadrature(u, v, rho), abs=1e-10)


def test_bivariate_infinite_limits():
    assert biv_normal_cdf(math.inf, 0.3, 0.4) == pytest.approx(float(stats.norm.cdf(0.3)), abs=1e-15)
    assert biv_normal_cdf(-0.2, math.inf, -0.4) == pytest.approx(float(stats.norm.cdf(-0.2)), abs=1e-15)
    assert biv_normal_cdf(-math.inf, 1.0, 0.5) == 0.0
    assert biv_normal_cdf(math.inf, math.inf, 0.5) == 1.0


def test_bivariate_symmetry_and_broadcasting():
    u = np.array([-1.0, 0.0, 1.5])
    v = np.array([0.5, -0.7, 2.0])
    forward = biv_normal_cdf(u, v, 0.35)
    backward = biv_normal_cdf(v, u, 0.35)
    assert forward.shape == (3,)
    np.testing.assert_allclose(forward, backward, atol=1e-14)
    assert biv_normal_cdf(u, 0.0, 0.1).shape == (3,)


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.2])
def test_bivariate_rejects_degenerate_correlation(rho):
    with pytest.raises(DomainError):
        biv_normal_cdf(0.0, 0.0, rho)


def test_correlation_matrix_validation():
    with pytest.raises(DomainError):
        CorrelationMatrix(np.array([[1.0, 0.2], [0.3, 1.0]]))
    with pytest.raises(DomainError):
        CorrelationMatrix(np.array([[2.0, 0.2], [0.2, 1.0]]))
    with pytest.raises(DomainError):
        CorrelationMatrix(np.ones((2, 3)))
    with pytest.raises(NotPositiveDefiniteError):
        CorrelationMatrix(np.array([
            [1.0, 0.9, -0.9],
            [0.9, 1.0, 0.9],
            [-0.9, 0.9, 1.0],
        ]))


def test_cholesky_factor_reproduces_matrix():
    gamma = CorrelationMatrix.equicorrelated(4, 0.3)
    factor = gamma.cholesky()
    np.testing.assert_allclose(factor.lower @ factor.lower.T, gamma.entries, atol=1e-14)
    assert factor.log_determinant() == pytest.approx(math.log(np.linalg.det(gamma.entries)), rel=1e-12)


def test_mvn_density_matches_scipy():
    gamma = CorrelationMatrix(np.array([
        [1.0, 0.5, -0.2],
        [0.5, 1.0, 0.1],
        [-0.2, 0.1, 1.0],
    ]))
    points = np.array([[0.0, 0.0, 0.0], [1.0, -0.5, 2.0], [-1.5, 0.3, 0.7]])
    expected = stats.multivariate_normal(mean=np.zeros(3), cov=gamma.entries).pdf(points)
    np.testing.assert_allclose(mvn_pdf(points, gamma), expected, rtol=1e-12)
    assert mvn_log_pdf(points[1], gamma) == pytest.approx(math.log(expected[1]), rel=1e-12)


def test_mvn_monte_carlo_matches_bivariate_kernel():
    gamma = CorrelationMatrix.from_rho(0.6)
    estimate, std_error = mvn_cdf_mc([0.3, -0.4], gamma, 200000, seed=11)
    exact = biv_normal_cdf(0.3, -0.4, 0.6)
    assert abs(estimate - exact) <= 4.0 * std_error


def test_mvn_monte_carlo_dimension_one():
    estimate, std_error = mvn_cdf_mc([0.8], CorrelationMatrix.identity(1), 100000, seed=5)
    assert abs(estimate - std_normal_cdf(0.8)) <= 4.0 * std_error


def test_mvn_monte_carlo_is_deterministic_and_guarded():
    gamma = CorrelationMatrix.equicorrelated(3, 0.2)
    assert mvn_cdf_mc([0.0, 0.1, 0.2], gamma, 5000, seed=3) == mvn_cdf_mc([0.0, 0.1, 0.2], gamma, 5000, seed=3)
    with pytest.raises(DomainError):
        mvn_cdf_mc([0.0, 0.1, 0.2], gamma, 999, seed=3)
    with pytest.raises(DomainError):
        mvn_cdf_mc([0.0, 0.1], gamma, 5000, seed=3)


def test_cdf_quantile_round_trip_on_dense_grid():
    z = np.linspace(-6.0, 6.0, 10 ** 4)
    assert np.max(np.abs(std_normal_quantile(std_normal_cdf(z)) - z)) <= 1e-8


@pytest.mark.parametrize("rho", [-0.8, 0.0, 0.8])
def test_bivariate_density_mass_on_truncated_square(rho):
    grid = np.linspace(-6.0, 6.0, 601)
    x, y = np.meshgrid(grid, grid, indexing="ij")
    density = mvn_pdf(np.stack([x, y], axis=-1), CorrelationMatrix.from_rho(rho))
    mass = integrate.trapezoid(integrate.trapezoid(density, grid, axis=1), grid)
    assert mass == pytest.approx(1.0, abs=1e-4)


def test_mvn_monte_carlo_standard_error_is_honest():
    """Trivariate orthant at the origin: 1/8 + sum of asin(gamma_ij) / (4 pi)."""
    entries = np.array([
        [1.0, 0.4, -0.3],
        [0.4, 1.0, 0.5],
        [-0.3, 0.5, 1.0],
    ])
    gamma = CorrelationMatrix(entries)
    exact = 0.125 + (math.asin(0.4) + math.asin(-0.3) + math.asin(0.5)) / (4.0 * math.pi)
    within = 0
    for seed in range(100):
        estimate, std_error = mvn_cdf_mc([0.0, 0.0, 0.0], gamma, 20000, seed=seed)
        within += abs(estimate - exact) <= 2.0 * std_error
    assert within >= 93


@pytest.mark.parametrize("dim", [2, 3, 5])
def test_mvn_monte_carlo_independent_orthant(dim):
    estimate, std_error = mvn_cdf_mc(np.zeros(dim), CorrelationMatrix.identity(dim), 50000, seed=dim)
    assert abs(estimate - 0.5 ** dim) <= 4.0 * std_error
