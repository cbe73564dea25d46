#!/usr/bin/env python3
"""
Univariate nu-Birnbaum-Saunders distribution
F(t) = Phi(xi_nu(t/beta) / alpha) with xi_nu(x) = x^nu - x^-nu

All tail quantities are computed from L = log(t/beta), so that
xi = 2 sinh(nu L) and the density bracket (t/beta)^(nu-1) + (beta/t)^(nu+1)
equals 2 e^-L cosh(nu L).
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple, Union

import numpy as np
from scipy.special import log_ndtr, ndtr

from normal_kernel import (
    LOG_2PI,
    ArrayLike,
    FloatArray,
    std_normal_quantile,
    unwrap_scalar,
)
from nubs_errors import DomainError, QuadratureConvergenceError, SurvivalUnderflowError

MIN_MOMENT_NODES = 32
MOMENT_RELATIVE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class NuBsParams:
    """Shape alpha, scale beta and exponent nu, all strictly positive."""

    alpha: float
    beta: float
    nu: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "nu"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.alpha, self.beta, self.nu)

    @classmethod
    def classic(cls, alpha: float, beta: float) -> "NuBsParams":
        """The two-parameter Birnbaum-Saunders model (nu = 1/2)."""
        return cls(alpha, beta, 0.5)


def _positive_times(t: ArrayLike) -> FloatArray:
    t = np.asarray(t, dtype=float)
    if not np.all(t > 0.0):
        raise DomainError(f"lifetimes must be strictly positive, got {t!r}")
    return t


def _log_ratio(t: FloatArray, params: NuBsParams) -> FloatArray:
    return np.log(t) - math.log(params.beta)


def xi_from_log_ratio(log_ratio: FloatArray, nu: float) -> FloatArray:
    with np.errstate(over="ignore"):
        return 2.0 * np.sinh(nu * log_ratio)


def log_bracket(log_ratio: FloatArray, nu: float) -> FloatArray:
    """log[(t/beta)^(nu-1) + (beta/t)^(nu+1)] without overflow."""
    a = np.abs(nu * log_ratio)
    return -log_ratio + a + np.log1p(np.exp(-2.0 * a))


def xi(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    """(t/beta)^nu - (beta/t)^nu, evaluated in log space."""
    t = _positive_times(t)
    return unwrap_scalar(xi_from_log_ratio(_log_ratio(t, params), params.nu))


def latent_score(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    """xi(t)/alpha, the standard normal value that t maps to."""
    t = _positive_times(t)
    return unwrap_scalar(xi_from_log_ratio(_log_ratio(t, params), params.nu) / params.alpha)


def cdf(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    t = _positive_times(t)
    return unwrap_scalar(ndtr(xi_from_log_ratio(_log_ratio(t, params), params.nu) / params.alpha))


def sf(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    """Survival Phi(-xi/alpha); no 1 - F cancellation."""
    t = _positive_times(t)
    return unwrap_scalar(ndtr(-xi_from_log_ratio(_log_ratio(t, params), params.nu) / params.alpha))


def log_cdf(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    t = _positive_times(t)
    return unwrap_scalar(log_ndtr(xi_from_log_ratio(_log_ratio(t, params), params.nu) / params.alpha))


def log_sf(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    t = _positive_times(t)
    return unwrap_scalar(log_ndtr(-xi_from_log_ratio(_log_ratio(t, params), params.nu) / params.alpha))


def _log_jacobian_from_log_ratio(log_ratio: FloatArray, params: NuBsParams) -> FloatArray:
    return (
        math.log(params.nu) - math.log(params.alpha) - math.log(params.beta)
        + log_bracket(log_ratio, params.nu)
    )


def log_latent_jacobian(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    """log of d(xi(t)/alpha)/dt = nu/(alpha beta) [(t/beta)^(nu-1) + (beta/t)^(nu+1)]."""
    t = _positive_times(t)
    return unwrap_scalar(_log_jacobian_from_log_ratio(_log_ratio(t, params), params))


def _log_pdf_array(t: FloatArray, params: NuBsParams) -> FloatArray:
    log_ratio = _log_ratio(t, params)
    z = xi_from_log_ratio(log_ratio, params.nu) / params.alpha
    with np.errstate(over="ignore"):
        return -0.5 * LOG_2PI - 0.5 * z * z + _log_jacobian_from_log_ratio(log_ratio, params)


def log_pdf(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    """Log density; finite for (t/beta)^nu anywhere in e^-300 .. e^300."""
    return unwrap_scalar(_log_pdf_array(_positive_times(t), params))


def pdf(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    return unwrap_scalar(np.exp(_log_pdf_array(_positive_times(t), params)))


def quantile(p: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    """Closed-form inverse of the cdf.

    With z = Phi^-1(p) the positive root of w - 1/w = alpha z is
    w = exp(asinh(alpha z / 2)), and t = beta w^(1/nu).
    """
    z = np.asarray(std_normal_quantile(p), dtype=float)
    return unwrap_scalar(from_latent(z, params))


def from_latent(z: ArrayLike, params: NuBsParams) -> FloatArray:
    """Inverse of latent_score: beta * exp(asinh(alpha z / 2) / nu)."""
    z = np.asarray(z, dtype=float)
    return params.beta * np.exp(np.arcsinh(params.alpha * z / 2.0) / params.nu)


def sample(params: NuBsParams, n: int, seed: int) -> FloatArray:
    """n i.i.d. lifetimes pushed through the inverse xi map; deterministic per seed."""
    if int(n) < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return from_latent(rng.standard_normal(int(n)), params)


@lru_cache(maxsize=16)
def _hermite_rule(n_nodes: int) -> Tuple[FloatArray, FloatArray]:
    """Nodes and weights for E[g(Z)], Z ~ N(0, 1)."""
    x, w = np.polynomial.hermite.hermgauss(n_nodes)
    return math.sqrt(2.0) * x, w / math.sqrt(math.pi)


def _normal_expectation(values_at: Callable[[FloatArray], FloatArray], n_nodes: int) -> float:
    nodes, weights = _hermite_rule(n_nodes)
    return float(np.dot(weights, values_at(nodes)))


def raw_moment(k: int, params: NuBsParams, n_nodes: int = 64) -> float:
    """E[T^k] by Gauss-Hermite quadrature over the latent normal.

    The rule is run with n_nodes and 2 * n_nodes; the finer value is returned
    and QuadratureConvergenceError is raised when the two differ by more than
    1e-6 relative.
    """
    if int(k) != k or k < 1:
        raise DomainError(f"moment order must be a positive integer, got {k}")
    if n_nodes < MIN_MOMENT_NODES:
        raise DomainError(f"need at least {MIN_MOMENT_NODES} quadrature nodes, got {n_nodes}")
    k = int(k)

    def integrand(z: FloatArray) -> FloatArray:
        return np.exp(k * np.arcsinh(params.alpha * z / 2.0) / params.nu)

    coarse = _normal_expectation(integrand, n_nodes)
    fine = _normal_expectation(integrand, 2 * n_nodes)
    if not math.isfinite(fine) or abs(fine - coarse) > MOMENT_RELATIVE_TOLERANCE * abs(fine):
        raise QuadratureConvergenceError(
            f"moment k={k} did not settle: {coarse!r} with {n_nodes} nodes, "
            f"{fine!r} with {2 * n_nodes}",
            coarse * params.beta ** k,
            fine * params.beta ** k,
        )
    return fine * params.beta ** k


def mean(params: NuBsParams, n_nodes: int = 64) -> float:
    return raw_moment(1, params, n_nodes)


def variance(params: NuBsParams, n_nodes: int = 64) -> float:
    m1 = raw_moment(1, params, n_nodes)
    return raw_moment(2, params, n_nodes) - m1 * m1


def median(params: NuBsParams) -> float:
    """F(beta) = 1/2 for every alpha and nu."""
    return params.beta


def reciprocal_params(params: NuBsParams) -> NuBsParams:
    """Parameters of 1/T: (alpha, 1/beta, nu).

    xi(1/t; 1/beta, nu) = -xi(t; beta, nu) and Z -> -Z leaves N(0, 1) fixed,
    so the exponent nu is unchanged.
    """
    return NuBsParams(params.alpha, 1.0 / params.beta, params.nu)


def hazard(t: ArrayLike, params: NuBsParams) -> Union[float, FloatArray]:
    """f(t) / S(t), formed as exp(log f - log S).

    Raises SurvivalUnderflowError where S(t) rounds to zero in double precision.
    """
    t = _positive_times(t)
    log_ratio = _log_ratio(t, params)
    z = xi_from_log_ratio(log_ratio, params.nu) / params.alpha
    if np.any(ndtr(-z) == 0.0):
        raise SurvivalUnderflowError(
            f"survival function underflows at t={t!r} for {params}"
        )
    return unwrap_scalar(np.exp(_log_pdf_array(t, params) - log_ndtr(-z)))


def classic_bs_cdf(t: ArrayLike, alpha: float, beta: float) -> Union[float, FloatArray]:
    """Two-parameter Birnbaum-Saunders cdf, coded from its own formula."""
    t = _positive_times(t)
    return unwrap_scalar(ndtr((np.sqrt(t / beta) - np.sqrt(beta / t)) / alpha))


def classic_bs_pdf(t: ArrayLike, alpha: float, beta: float) -> Union[float, FloatArray]:
    """Two-parameter Birnbaum-Saunders density, coded from its own formula."""
    t = _positive_times(t)
    ratio = beta / t
    front = (np.sqrt(ratio) + ratio ** 1.5) / (2.0 * math.sqrt(2.0 * math.pi) * alpha * beta)
    return unwrap_scalar(front * np.exp(-(t / beta + ratio - 2.0) / (2.0 * alpha * alpha)))


__all__ = [
    "NuBsParams",
    "xi",
    "xi_from_log_ratio",
    "log_bracket",
    "latent_score",
    "log_latent_jacobian",
    "from_latent",
    "cdf",
    "sf",
    "log_cdf",
    "log_sf",
    "pdf",
    "log_pdf",
    "quantile",
    "sample",
    "raw_moment",
    "mean",
    "variance",
    "median",
    "reciprocal_params",
    "hazard",
    "classic_bs_cdf",
    "classic_bs_pdf",
]
