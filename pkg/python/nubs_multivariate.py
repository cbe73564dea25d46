#!/usr/bin/env python3
"""
Bivariate and m-variate nu-Birnbaum-Saunders distributions
Each coordinate is the univariate inverse-xi map of one component of a
correlated standard normal vector
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from normal_kernel import (
    LOG_2PI,
    ArrayLike,
    CorrelationMatrix,
    FloatArray,
    biv_normal_cdf,
    mvn_cdf_mc,
    mvn_log_pdf,
    unwrap_scalar,
)
from nubs_errors import DomainError
import nubs_univariate as uni
from nubs_univariate import NuBsParams

RECIPROCAL_MODES = ("both", "first", "second")


@dataclass(frozen=True)
class BivNuBsParams:
    """Two univariate triples tied by the latent correlation rho."""

    p1: NuBsParams
    p2: NuBsParams
    rho: float

    def __post_init__(self) -> None:
        rho = float(self.rho)
        if not (math.isfinite(rho) and abs(rho) < 1.0):
            raise DomainError(f"rho must satisfy |rho| < 1, got {rho!r}")
        object.__setattr__(self, "rho", rho)

    def as_tuple(self) -> Tuple[float, ...]:
        """(alpha1, beta1, nu1, alpha2, beta2, nu2, rho)."""
        return self.p1.as_tuple() + self.p2.as_tuple() + (self.rho,)

    @classmethod
    def from_tuple(cls, values: Tuple[float, ...]) -> "BivNuBsParams":
        if len(values) != 7:
            raise DomainError(f"bivariate parameters need 7 values, got {len(values)}")
        a1, b1, n1, a2, b2, n2, rho = (float(v) for v in values)
        return cls(NuBsParams(a1, b1, n1), NuBsParams(a2, b2, n2), rho)

    def component(self, which: int) -> NuBsParams:
        if which == 1:
            return self.p1
        if which == 2:
            return self.p2
        raise DomainError(f"component must be 1 or 2, got {which!r}")


@dataclass(frozen=True, eq=False)
class MultiNuBsParams:
    """m-variate parameters: per-coordinate alpha and beta, one shared nu."""

    alphas: FloatArray
    betas: FloatArray
    nu: float
    gamma: CorrelationMatrix

    def __post_init__(self) -> None:
        alphas = np.array(self.alphas, dtype=float).reshape(-1)
        betas = np.array(self.betas, dtype=float).reshape(-1)
        if alphas.shape != betas.shape or alphas.shape[0] != self.gamma.dim:
            raise DomainError(
                f"length mismatch: {alphas.shape[0]} alphas, {betas.shape[0]} betas, "
                f"correlation dimension {self.gamma.dim}"
            )
        if not (np.all(np.isfinite(alphas)) and np.all(alphas > 0.0)):
            raise DomainError("all alphas must be finite and > 0")
        if not (np.all(np.isfinite(betas)) and np.all(betas > 0.0)):
            raise DomainError("all betas must be finite and > 0")
        nu = float(self.nu)
        if not (math.isfinite(nu) and nu > 0.0):
            raise DomainError(f"nu must be finite and > 0, got {nu!r}")
        alphas.setflags(write=False)
        betas.setflags(write=False)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "nu", nu)

    @property
    def dim(self) -> int:
        return self.gamma.dim

    def marginal(self, i: int) -> NuBsParams:
        return NuBsParams(float(self.alphas[i]), float(self.betas[i]), self.nu)


def _pair(t1: ArrayLike, t2: ArrayLike) -> Tuple[FloatArray, FloatArray]:
    t1, t2 = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))
    if not (np.all(t1 > 0.0) and np.all(t2 > 0.0)):
        raise DomainError("bivariate coordinates must be strictly positive")
    return t1, t2


def _latent(t: FloatArray, params: NuBsParams) -> FloatArray:
    return np.asarray(uni.latent_score(t, params), dtype=float)


def biv_cdf(t1: ArrayLike, t2: ArrayLike, params: BivNuBsParams) -> Union[float, FloatArray]:
    """Phi_2(xi1/alpha1, xi2/alpha2; rho)."""
    t1, t2 = _pair(t1, t2)
    return biv_normal_cdf(_latent(t1, params.p1), _latent(t2, params.p2), params.rho)


def biv_log_pdf(t1: ArrayLike, t2: ArrayLike, params: BivNuBsParams) -> Union[float, FloatArray]:
    """Log joint density: log phi_2 of the latent pair plus both log Jacobians."""
    t1, t2 = _pair(t1, t2)
    u = _latent(t1, params.p1)
    v = _latent(t2, params.p2)
    rho = params.rho
    one_minus_r2 = (1.0 - rho) * (1.0 + rho)
    with np.errstate(over="ignore", invalid="ignore"):
        quad = (u * u - 2.0 * rho * u * v + v * v) / one_minus_r2
        log_phi2 = -LOG_2PI - 0.5 * math.log(one_minus_r2) - 0.5 * quad
    log_jac = (np.asarray(uni.log_latent_jacobian(t1, params.p1))
               + np.asarray(uni.log_latent_jacobian(t2, params.p2)))
    return unwrap_scalar(log_phi2 + log_jac)


def biv_pdf(t1: ArrayLike, t2: ArrayLike, params: BivNuBsParams) -> Union[float, FloatArray]:
    return unwrap_scalar(np.exp(np.asarray(biv_log_pdf(t1, t2, params))))


def biv_marginal_pdf(which: int, t: ArrayLike, params: BivNuBsParams) -> Union[float, FloatArray]:
    """Marginal density of T_which: the univariate density of its own triple."""
    return uni.pdf(t, params.component(which))


def _correlated_normals(n: int, factor: FloatArray, seed: int) -> FloatArray:
    if int(n) < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return rng.standard_normal((int(n), factor.shape[0])) @ factor.T


def biv_sample(params: BivNuBsParams, n: int, seed: int) -> FloatArray:
    """n x 2 draws: correlated normals through each coordinate's inverse xi map."""
    factor = CorrelationMatrix.from_rho(params.rho).cholesky().lower
    z = _correlated_normals(n, factor, seed)
    return np.column_stack([
        uni.from_latent(z[:, 0], params.p1),
        uni.from_latent(z[:, 1], params.p2),
    ])


def biv_latent_correlation(data: ArrayLike, params: BivNuBsParams) -> float:
    """Pearson correlation of the latent scores (xi1/alpha1, xi2/alpha2)."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DomainError(f"expected an n x 2 array, got shape {data.shape}")
    u = _latent(data[:, 0], params.p1)
    v = _latent(data[:, 1], params.p2)
    return float(np.corrcoef(u, v)[0, 1])


def biv_reciprocal_params(mode: str, params: BivNuBsParams) -> BivNuBsParams:
    """Parameters after reciprocating one or both coordinates.

    Reciprocating a coordinate negates its latent normal, so rho keeps its sign
    for mode "both" and flips it for "first" or "second".
    """
    if mode not in RECIPROCAL_MODES:
        raise DomainError(f"mode must be one of {RECIPROCAL_MODES}, got {mode!r}")
    p1 = uni.reciprocal_params(params.p1) if mode in ("both", "first") else params.p1
    p2 = uni.reciprocal_params(params.p2) if mode in ("both", "second") else params.p2
    rho = params.rho if mode == "both" else -params.rho
    return BivNuBsParams(p1, p2, rho)


def _multi_points(t: ArrayLike, params: MultiNuBsParams) -> FloatArray:
    t = np.asarray(t, dtype=float)
    if t.ndim == 0 or t.shape[-1] != params.dim:
        raise DomainError(f"point dimension does not match m={params.dim}")
    if not np.all(t > 0.0):
        raise DomainError("coordinates must be strictly positive")
    return t


def _multi_latent_and_jacobian(t: FloatArray, params: MultiNuBsParams) -> Tuple[FloatArray, FloatArray]:
    """Latent vector (xi_i/alpha_i) and the summed log Jacobian, coordinate by coordinate."""
    u = np.empty_like(t)
    log_jac = np.zeros(t.shape[:-1])
    for i in range(params.dim):
        marginal = params.marginal(i)
        u[..., i] = uni.latent_score(t[..., i], marginal)
        log_jac = log_jac + uni.log_latent_jacobian(t[..., i], marginal)
    return u, log_jac


def multi_log_pdf(t: ArrayLike, params: MultiNuBsParams) -> Union[float, FloatArray]:
    t = _multi_points(t, params)
    u, log_jac = _multi_latent_and_jacobian(t, params)
    return unwrap_scalar(np.asarray(mvn_log_pdf(u, params.gamma)) + log_jac)


def multi_pdf(t: ArrayLike, params: MultiNuBsParams) -> Union[float, FloatArray]:
    """phi_m of the latent vector times the product of coordinate Jacobians."""
    return unwrap_scalar(np.exp(np.asarray(multi_log_pdf(t, params))))


def multi_cdf(t: ArrayLike, params: MultiNuBsParams, n_draws: int,
              seed: int) -> Tuple[float, float]:
    """Monte Carlo P(T <= t) with its standard error."""
    t = _multi_points(t, params)
    if t.ndim != 1:
        raise DomainError("multi_cdf evaluates a single point")
    u, _ = _multi_latent_and_jacobian(t, params)
    return mvn_cdf_mc(u, params.gamma, n_draws, seed)


def multi_sample(params: MultiNuBsParams, n: int, seed: int) -> FloatArray:
    """n x m draws through the Cholesky factor and the inverse xi map."""
    z = _correlated_normals(n, params.gamma.cholesky().lower, seed)
    return params.betas * np.exp(np.arcsinh(params.alphas * z / 2.0) / params.nu)


def multi_marginal_params(i: int, params: MultiNuBsParams) -> NuBsParams:
    if not 0 <= i < params.dim:
        raise DomainError(f"coordinate index {i} out of range for m={params.dim}")
    return params.marginal(i)


def multi_from_bivariate(params: BivNuBsParams) -> MultiNuBsParams:
    """The m = 2 form of a bivariate model; requires nu1 == nu2."""
    if params.p1.nu != params.p2.nu:
        raise DomainError("m-variate model shares one nu; the bivariate exponents differ")
    return MultiNuBsParams(
        np.array([params.p1.alpha, params.p2.alpha]),
        np.array([params.p1.beta, params.p2.beta]),
        params.p1.nu,
        CorrelationMatrix.from_rho(params.rho),
    )
