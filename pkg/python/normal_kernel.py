#!/usr/bin/env python3
"""
Standard normal kernels
Univariate pdf/cdf/quantile, bivariate cdf, and correlated m-variate density and
Monte Carlo cdf that the nu-BS formulas are composed with
"""

import math
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np
import numpy.typing as npt
from scipy import linalg
from scipy.special import ndtr, ndtri

from nubs_errors import DomainError, NotPositiveDefiniteError

FloatArray = npt.NDArray[np.float64]
ArrayLike = Union[float, npt.ArrayLike]

LOG_2PI = math.log(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

SYMMETRY_TOLERANCE = 1e-12
MIN_MC_DRAWS = 1000

# Gauss-Legendre half-rules (abscissae in (0, 1), weights) for 6, 12 and 20 points
_GL6 = (
    np.array([0.9324695142031522, 0.6612093864662647, 0.2386191860831970]),
    np.array([0.1713244923791705, 0.3607615730481384, 0.4679139345726904]),
)
_GL12 = (
    np.array([0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
              0.5873179542866171, 0.3678314989981802, 0.1252334085114692]),
    np.array([0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
              0.2031674267230659, 0.2334925365383547, 0.2491470458134029]),
)
_GL20 = (
    np.array([0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
              0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
              0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
              0.07652652113349733]),
    np.array([0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
              0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
              0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
              0.1527533871307259]),
)


def unwrap_scalar(result: FloatArray) -> Union[float, FloatArray]:
    """Return a Python float for 0-d results, the array otherwise."""
    if np.ndim(result) == 0:
        return float(result)
    return result


def std_normal_pdf(z: ArrayLike) -> Union[float, FloatArray]:
    """Standard normal density (2*pi)^(-1/2) exp(-z^2/2)."""
    z = np.asarray(z, dtype=float)
    return unwrap_scalar(INV_SQRT_2PI * np.exp(-0.5 * z * z))


def std_normal_cdf(z: ArrayLike) -> Union[float, FloatArray]:
    """Standard normal cdf; infinite arguments resolve to 0 or 1."""
    return unwrap_scalar(ndtr(np.asarray(z, dtype=float)))


def std_normal_quantile(p: ArrayLike) -> Union[float, FloatArray]:
    """Inverse of the standard normal cdf on the open interval (0, 1)."""
    p = np.asarray(p, dtype=float)
    if not np.all((p > 0.0) & (p < 1.0)):
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    return unwrap_scalar(ndtri(p))


def _upper_orthant(h: float, k: float, r: float) -> float:
    """P(X > h, Y > k) for a standard bivariate normal with correlation r.

    Drezner-Wesolowsky reduction with Genz's double-precision treatment of
    |r| >= 0.925. h and k must be finite.
    """
    if r == 0.0:
        return float(ndtr(-h) * ndtr(-k))

    if abs(r) < 0.3:
        half_x, half_w = _GL6
    elif abs(r) < 0.75:
        half_x, half_w = _GL12
    else:
        half_x, half_w = _GL20
    x = np.concatenate([1.0 - half_x, 1.0 + half_x])
    w = np.concatenate([half_w, half_w])

    hk = h * k
    if abs(r) < 0.925:
        hs = (h * h + k * k) / 2.0
        asr = math.asin(r) / 2.0
        sn = np.sin(asr * x)
        bvn = float(np.dot(np.exp((sn * hk - hs) / (1.0 - sn * sn)), w))
        return bvn * asr / (2.0 * math.pi) + float(ndtr(-h) * ndtr(-k))

    if r < 0.0:
        k = -k
        hk = -hk
    bvn = 0.0
    if abs(r) < 1.0:
        one_minus_r2 = (1.0 - r) * (1.0 + r)
        a = math.sqrt(one_minus_r2)
        bs = (h - k) ** 2
        asr = -(bs / one_minus_r2 + hk) / 2.0
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 80.0
        if asr > -100.0:
            bvn = a * math.exp(asr) * (
                1.0 - c * (bs - one_minus_r2) * (1.0 - d * bs) / 3.0
                + c * d * one_minus_r2 * one_minus_r2
            )
        if hk > -100.0:
            b = math.sqrt(bs)
            sp = math.sqrt(2.0 * math.pi) * float(ndtr(-b / a))
            bvn -= math.exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0)
        a /= 2.0
        xs = (a * x) ** 2
        asr_nodes = -(bs / xs + hk) / 2.0
        keep = asr_nodes > -100.0
        xs = xs[keep]
        sp_nodes = 1.0 + c * xs * (1.0 + 5.0 * d * xs)
        rs = np.sqrt(1.0 - xs)
        ep = np.exp(-(hk / 2.0) * xs / (1.0 + rs) ** 2) / rs
        bvn = (a * float(np.dot(np.exp(asr_nodes[keep]) * (sp_nodes - ep), w[keep])) - bvn) / (
            2.0 * math.pi
        )

    if r > 0.0:
        return bvn + float(ndtr(-max(h, k)))
    if h >= k:
        return -bvn
    if h < 0.0:
        lower = float(ndtr(k) - ndtr(h))
    else:
        lower = float(ndtr(-h) - ndtr(-k))
    return lower - bvn


def _biv_normal_cdf_scalar(u: float, v: float, rho: float) -> float:
    if math.isnan(u) or math.isnan(v):
        raise DomainError("bivariate normal cdf is undefined at NaN")
    if u == -math.inf or v == -math.inf:
        return 0.0
    if u == math.inf:
        return float(ndtr(v))
    if v == math.inf:
        return float(ndtr(u))
    p = _upper_orthant(-u, -v, rho)
    return min(1.0, max(0.0, p))


def biv_normal_cdf(u: ArrayLike, v: ArrayLike, rho: float) -> Union[float, FloatArray]:
    """Phi_2(u, v; rho), the standard bivariate normal cdf.

    u and v may be +/- inf; arrays broadcast against each other.
    """
    rho = float(rho)
    if not abs(rho) < 1.0:
        raise DomainError(f"correlation must satisfy |rho| < 1, got {rho}")
    u_arr, v_arr = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if u_arr.ndim == 0:
        return _biv_normal_cdf_scalar(float(u_arr), float(v_arr), rho)
    out = np.empty(u_arr.shape)
    for idx in np.ndindex(u_arr.shape):
        out[idx] = _biv_normal_cdf_scalar(float(u_arr[idx]), float(v_arr[idx]), rho)
    return out


@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    """Lower-triangular factor L with L L^T equal to the source matrix."""

    dim: int
    lower: FloatArray = field(repr=False)

    def log_determinant(self) -> float:
        """log |L L^T|."""
        return 2.0 * float(np.sum(np.log(np.diag(self.lower))))


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Validated positive-definite correlation matrix.

    Symmetric to within 1e-12, unit diagonal, off-diagonals in [-1, 1],
    and a Cholesky factorization with positive pivots.
    """

    entries: FloatArray
    _factor: CholeskyFactor = field(init=False, repr=False)

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise DomainError(f"correlation matrix must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise DomainError("correlation matrix has non-finite entries")
        if not np.all(np.abs(entries - entries.T) <= SYMMETRY_TOLERANCE):
            raise DomainError("correlation matrix is not symmetric")
        if not np.all(np.diag(entries) == 1.0):
            raise DomainError("correlation matrix must have a unit diagonal")
        if np.any(np.abs(entries) > 1.0):
            raise DomainError("correlation entries must lie in [-1, 1]")
        try:
            lower = np.linalg.cholesky(entries)
        except np.linalg.LinAlgError as e:
            raise NotPositiveDefiniteError(f"correlation matrix is not positive definite: {e}") from e
        if not np.all(np.diag(lower) > 0.0):
            raise NotPositiveDefiniteError("correlation matrix has a zero pivot")
        entries.setflags(write=False)
        lower.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_factor", CholeskyFactor(entries.shape[0], lower))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def cholesky(self) -> CholeskyFactor:
        return self._factor

    @classmethod
    def identity(cls, dim: int) -> "CorrelationMatrix":
        return cls(np.eye(dim))

    @classmethod
    def from_rho(cls, rho: float) -> "CorrelationMatrix":
        """2x2 matrix with off-diagonal rho."""
        return cls(np.array([[1.0, rho], [rho, 1.0]]))

    @classmethod
    def equicorrelated(cls, dim: int, rho: float) -> "CorrelationMatrix":
        entries = np.full((dim, dim), float(rho))
        np.fill_diagonal(entries, 1.0)
        return cls(entries)


def _check_dimension(u: FloatArray, gamma: CorrelationMatrix) -> None:
    if u.shape[-1] != gamma.dim:
        raise DomainError(f"point has dimension {u.shape[-1]}, correlation matrix {gamma.dim}")


def mvn_log_pdf(u: ArrayLike, gamma: CorrelationMatrix) -> Union[float, FloatArray]:
    """Log density of N(0, gamma) at u (a vector, or one point per row)."""
    u = np.asarray(u, dtype=float)
    if u.ndim == 0:
        u = u.reshape(1)
    _check_dimension(u, gamma)
    factor = gamma.cholesky()
    points = u.reshape(-1, gamma.dim)
    y = linalg.solve_triangular(factor.lower, points.T, lower=True)
    quad = np.sum(y * y, axis=0)
    log_pdf = -0.5 * gamma.dim * LOG_2PI - 0.5 * factor.log_determinant() - 0.5 * quad
    if u.ndim == 1:
        return float(log_pdf[0])
    return log_pdf.reshape(u.shape[:-1])


def mvn_pdf(u: ArrayLike, gamma: CorrelationMatrix) -> Union[float, FloatArray]:
    """Density of N(0, gamma) at u via the triangular factor."""
    return unwrap_scalar(np.exp(mvn_log_pdf(u, gamma)))


def mvn_cdf_mc(u: ArrayLike, gamma: CorrelationMatrix, n_draws: int,
               seed: int) -> Tuple[float, float]:
    """Monte Carlo estimate of Phi_m(u; gamma) and its binomial standard error.

    Draws Z = L E with E standard normal; deterministic for a given seed.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    _check_dimension(u, gamma)
    if int(n_draws) < MIN_MC_DRAWS:
        raise DomainError(f"n_draws must be at least {MIN_MC_DRAWS}, got {n_draws}")
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((int(n_draws), gamma.dim)) @ gamma.cholesky().lower.T
    hits = np.all(draws <= u, axis=1)
    estimate = float(np.mean(hits))
    std_error = math.sqrt(estimate * (1.0 - estimate) / int(n_draws))
    return estimate, std_error
