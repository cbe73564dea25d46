#!/usr/bin/env python3
"""
Maximum-likelihood fitting for nu-Birnbaum-Saunders models

Univariate fits search the profile likelihood over (log beta, log nu), with
alpha in closed form for every candidate. Bivariate fits search all seven
parameters in unconstrained coordinates (log alpha, log beta, log nu per
margin and atanh rho).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import linalg, optimize, stats

from normal_kernel import LOG_2PI, ArrayLike, FloatArray
from nubs_config import DEFAULT_CONFIG, default_worker_count, get_logger
from nubs_errors import DomainError, HessianError
import nubs_univariate as uni
from nubs_univariate import NuBsParams
from nubs_multivariate import BivNuBsParams, biv_latent_correlation

logger = get_logger("estimation")

MIN_UNIVARIATE_OBS = 4
MIN_BIVARIATE_OBS = 10
CLASSIC_NU = 0.5

BIVARIATE_GRADIENT_TOLERANCE = 1e-3
GRADIENT_STEP = 1e-6
HESSIAN_RELATIVE_STEP = 1e-4
MAX_START_RHO = 0.95

# Below this exponent the fitted model is indistinguishable from its lognormal limit
LOGNORMAL_LIMIT_NU = 1e-3

Params = Union[NuBsParams, BivNuBsParams]
Objective = Callable[[FloatArray], float]


class InitStrategy(str, Enum):
    """Where the optimizer starts."""

    MOMENT_BASED = "moment-based"
    GRID = "grid"
    USER_SUPPLIED = "user-supplied"


@dataclass(frozen=True)
class OptimizerConfig:
    """Optimizer settings; `initial` is required for the user-supplied strategy."""

    max_iterations: int = DEFAULT_CONFIG["max_iterations"]
    rel_tolerance: float = DEFAULT_CONFIG["rel_tolerance"]
    restarts: int = DEFAULT_CONFIG["restarts"]
    init_strategy: InitStrategy = InitStrategy.GRID
    nu_grid: Tuple[float, ...] = tuple(DEFAULT_CONFIG["nu_grid"])
    initial: Optional[Params] = None
    score_tolerance: float = DEFAULT_CONFIG["score_tolerance"]
    max_workers: Optional[int] = DEFAULT_CONFIG["max_workers"]

    def __post_init__(self) -> None:
        try:
            strategy = InitStrategy(self.init_strategy)
        except ValueError as e:
            raise DomainError(f"unknown init_strategy {self.init_strategy!r}") from e
        object.__setattr__(self, "init_strategy", strategy)
        object.__setattr__(self, "nu_grid", tuple(float(v) for v in self.nu_grid))

        if not (self.rel_tolerance > 0.0):
            raise DomainError(f"rel_tolerance must be > 0, got {self.rel_tolerance}")
        if self.restarts < 1:
            raise DomainError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iterations < 1:
            raise DomainError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.nu_grid or not all(math.isfinite(v) and v > 0.0 for v in self.nu_grid):
            raise DomainError("nu_grid must be a nonempty list of positive values")
        if strategy is InitStrategy.USER_SUPPLIED and self.initial is None:
            raise DomainError("the user-supplied strategy needs initial parameters")

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "OptimizerConfig":
        """Build from a configuration dictionary, falling back to the defaults."""
        merged = dict(DEFAULT_CONFIG)
        merged.update(config)
        return cls(
            max_iterations=int(merged["max_iterations"]),
            rel_tolerance=float(merged["rel_tolerance"]),
            restarts=int(merged["restarts"]),
            init_strategy=merged["init_strategy"],
            nu_grid=tuple(merged["nu_grid"]),
            score_tolerance=float(merged["score_tolerance"]),
            max_workers=merged.get("max_workers"),
        )

    def starting_from(self, initial: Params) -> "OptimizerConfig":
        return replace(self, init_strategy=InitStrategy.USER_SUPPLIED, initial=initial)


def params_as_dict(params: Params) -> Dict[str, float]:
    if isinstance(params, BivNuBsParams):
        names = ("alpha1", "beta1", "nu1", "alpha2", "beta2", "nu2", "rho")
        return dict(zip(names, params.as_tuple()))
    return {"alpha": params.alpha, "beta": params.beta, "nu": params.nu}


@dataclass(frozen=True)
class FitResult:
    """Outcome of one maximum-likelihood fit.

    score_residuals holds theta_j * dlogL/dtheta_j / n for each free
    parameter (atanh rho for the correlation). start_log_likelihoods are the
    log-likelihoods at every starting point the optimizer used.
    """

    params: Params
    log_likelihood: float
    converged: bool
    n_iterations: int
    score_residuals: Tuple[float, ...]
    aic: float
    bic: float
    n_obs: int
    std_errors: Optional[Tuple[float, ...]] = None
    fixed_nu: Optional[float] = None
    at_boundary: bool = False
    start_log_likelihoods: Tuple[float, ...] = ()

    @property
    def n_params(self) -> int:
        if isinstance(self.params, BivNuBsParams):
            return 7
        return 2 if self.fixed_nu is not None else 3

    def parameter_names(self) -> Tuple[str, ...]:
        names = tuple(params_as_dict(self.params))
        if self.fixed_nu is not None:
            return names[:2]
        return names

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": params_as_dict(self.params),
            "log_likelihood": self.log_likelihood,
            "converged": self.converged,
            "n_iterations": self.n_iterations,
            "score_residuals": list(self.score_residuals),
            "std_errors": None if self.std_errors is None else list(self.std_errors),
            "aic": self.aic,
            "bic": self.bic,
            "n_obs": self.n_obs,
            "fixed_nu": self.fixed_nu,
            "at_boundary": self.at_boundary,
        }


def information_criteria(log_likelihood: float, k: int, n: int) -> Tuple[float, float]:
    """(AIC, BIC) = (2k - 2 logL, k ln n - 2 logL)."""
    return 2.0 * k - 2.0 * log_likelihood, k * math.log(n) - 2.0 * log_likelihood


def _univariate_sample(data: ArrayLike, min_obs: int) -> FloatArray:
    t = np.asarray(data, dtype=float).reshape(-1)
    if t.size < min_obs:
        raise DomainError(f"need at least {min_obs} observations, got {t.size}")
    if not (np.all(np.isfinite(t)) and np.all(t > 0.0)):
        raise DomainError("observations must be finite and strictly positive")
    if np.unique(t).size < 2:
        raise DomainError("observations must contain at least two distinct values")
    return t


def _check_nu(nu: float) -> float:
    nu = float(nu)
    if not (math.isfinite(nu) and nu > 0.0):
        raise DomainError(f"nu must be finite and > 0, got {nu!r}")
    return nu


def uni_log_likelihood(data: ArrayLike, params: NuBsParams) -> float:
    """n log nu - n log alpha - n log beta - (n/2) log 2pi - sum(xi^2)/(2 alpha^2)
    + sum log[(t/beta)^(nu-1) + (beta/t)^(nu+1)].

    Returns -inf when any observation is not a finite positive number.
    """
    t = np.asarray(data, dtype=float).reshape(-1)
    if t.size == 0:
        raise DomainError("log-likelihood of an empty sample")
    if not (np.all(np.isfinite(t)) and np.all(t > 0.0)):
        return -math.inf
    n = t.size
    alpha, beta, nu = params.as_tuple()
    log_ratio = np.log(t) - math.log(beta)
    with np.errstate(over="ignore", invalid="ignore"):
        xi = uni.xi_from_log_ratio(log_ratio, nu)
        sum_sq = float(np.sum(xi * xi))
        value = (
            n * (math.log(nu) - math.log(alpha) - math.log(beta) - 0.5 * LOG_2PI)
            - sum_sq / (2.0 * alpha * alpha)
            + float(np.sum(uni.log_bracket(log_ratio, nu)))
        )
    return value if not math.isnan(value) else -math.inf


def _score_from_log_ratio(log_ratio: FloatArray, alpha: float, beta: float,
                          nu: float) -> FloatArray:
    n = log_ratio.size
    with np.errstate(over="ignore", invalid="ignore"):
        xi = uni.xi_from_log_ratio(log_ratio, nu)
        sinh2 = np.sinh(2.0 * nu * log_ratio)
        tanh1 = np.tanh(nu * log_ratio)
        a2 = alpha * alpha
        d_alpha = -n / alpha + float(np.sum(xi * xi)) / (a2 * alpha)
        d_beta = (2.0 * nu / a2 * float(np.sum(sinh2)) - nu * float(np.sum(tanh1))) / beta
        d_nu = (
            n / nu
            - 2.0 / a2 * float(np.sum(log_ratio * sinh2))
            + float(np.sum(log_ratio * tanh1))
        )
    return np.array([d_alpha, d_beta, d_nu])


def uni_score(data: ArrayLike, params: NuBsParams) -> FloatArray:
    """Partial derivatives (dlogL/dalpha, dlogL/dbeta, dlogL/dnu)."""
    t = np.asarray(data, dtype=float).reshape(-1)
    if t.size == 0 or not (np.all(np.isfinite(t)) and np.all(t > 0.0)):
        raise DomainError("score needs a nonempty sample of positive observations")
    return _score_from_log_ratio(np.log(t) - math.log(params.beta), *params.as_tuple())


class _ProfileObjective:
    """Negative profile log-likelihood over x = (log beta[, log nu])."""

    def __init__(self, t: FloatArray, fixed_nu: Optional[float]) -> None:
        self.log_t = np.log(t)
        self.n = t.size
        self.fixed_nu = fixed_nu

    def pack(self, beta: float, nu: float) -> FloatArray:
        if self.fixed_nu is not None:
            return np.array([math.log(beta)])
        return np.array([math.log(beta), math.log(nu)])

    def _unpack(self, x: FloatArray) -> Tuple[float, float]:
        if self.fixed_nu is not None:
            return float(x[0]), self.fixed_nu
        return float(x[0]), float(np.exp(x[1]))

    def alpha_and_log_likelihood(self, x: FloatArray) -> Tuple[float, float]:
        log_beta, nu = self._unpack(x)
        n = self.n
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            log_ratio = self.log_t - log_beta
            xi = uni.xi_from_log_ratio(log_ratio, nu)
            alpha = math.sqrt(float(np.mean(xi * xi)))
            if not (0.0 < alpha < math.inf and 0.0 < nu < math.inf):
                return alpha, -math.inf
            value = (
                n * (math.log(nu) - math.log(alpha) - log_beta)
                - 0.5 * n * (LOG_2PI + 1.0)
                + float(np.sum(uni.log_bracket(log_ratio, nu)))
            )
        return alpha, value if math.isfinite(value) else -math.inf

    def value(self, x: FloatArray) -> float:
        return -self.alpha_and_log_likelihood(x)[1]

    def gradient(self, x: FloatArray) -> FloatArray:
        # alpha sits at its stationary point, so only the beta and nu scores remain
        alpha, value = self.alpha_and_log_likelihood(x)
        if not math.isfinite(value):
            return np.zeros_like(x)
        log_beta, nu = self._unpack(x)
        beta = math.exp(log_beta)
        score = _score_from_log_ratio(self.log_t - log_beta, alpha, beta, nu)
        grad = -np.array([beta * score[1], nu * score[2]])[: x.size]
        return grad if np.all(np.isfinite(grad)) else np.zeros_like(x)

    def params(self, x: FloatArray) -> NuBsParams:
        alpha, _ = self.alpha_and_log_likelihood(x)
        log_beta, nu = self._unpack(x)
        return NuBsParams(alpha, math.exp(log_beta), nu)


def profile_alpha(data: ArrayLike, beta: float, nu: float) -> float:
    """Closed-form alpha maximizing the likelihood for fixed (beta, nu):
    sqrt(mean[(t/beta)^(2nu) + (beta/t)^(2nu) - 2])."""
    t = np.asarray(data, dtype=float).reshape(-1)
    if t.size == 0 or not (np.all(np.isfinite(t)) and np.all(t > 0.0)):
        raise DomainError("profile alpha needs positive observations")
    xi = uni.xi_from_log_ratio(np.log(t) - math.log(beta), _check_nu(nu))
    return math.sqrt(float(np.mean(xi * xi)))


def profile_log_likelihood(data: ArrayLike, beta: float, nu: float) -> float:
    """Log-likelihood at (profile_alpha(beta, nu), beta, nu)."""
    t = np.asarray(data, dtype=float).reshape(-1)
    if t.size == 0 or not (np.all(np.isfinite(t)) and np.all(t > 0.0)):
        raise DomainError("profile log-likelihood needs positive observations")
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"beta must be finite and > 0, got {beta!r}")
    objective = _ProfileObjective(t, None)
    return objective.alpha_and_log_likelihood(objective.pack(beta, _check_nu(nu)))[1]


def _climb(objective: Objective, gradient: Optional[Callable[[FloatArray], FloatArray]],
           x0: FloatArray, config: OptimizerConfig) -> Tuple[FloatArray, float, int, bool]:
    """Rounds of Nelder-Mead then BFGS, each from the incumbent optimum.

    Stops once a round gains less than rel_tolerance relative, or after
    1 + restarts rounds. Returns (x, objective, iterations, settled).
    """
    x = np.asarray(x0, dtype=float)
    f = objective(x)
    iterations = 0
    nm_options = {
        "maxiter": config.max_iterations,
        "xatol": 1e-10,
        "fatol": 1e-12,
        "adaptive": x.size > 2,
    }
    with np.errstate(all="ignore"):
        for round_index in range(config.restarts + 1):
            f_before = f
            simplex = optimize.minimize(objective, x, method="Nelder-Mead", options=nm_options)
            iterations += int(simplex.nit)
            if simplex.fun < f:
                x, f = np.asarray(simplex.x), float(simplex.fun)
            polish = optimize.minimize(
                objective, x, jac=gradient, method="BFGS",
                options={"maxiter": config.max_iterations, "gtol": 1e-9},
            )
            iterations += int(polish.nit)
            if math.isfinite(polish.fun) and polish.fun < f:
                x, f = np.asarray(polish.x), float(polish.fun)
            if round_index > 0 and f_before - f <= config.rel_tolerance * max(abs(f), 1.0):
                return x, f, iterations, True
    return x, f, iterations, False


def _univariate_starts(t: FloatArray, config: OptimizerConfig,
                       fixed_nu: Optional[float]) -> List[Tuple[float, float]]:
    """(beta0, nu0) pairs for the configured strategy."""
    strategy = config.init_strategy
    if strategy is InitStrategy.USER_SUPPLIED:
        initial = config.initial
        if not isinstance(initial, NuBsParams):
            raise DomainError("univariate fit needs univariate initial parameters")
        return [(initial.beta, fixed_nu if fixed_nu is not None else initial.nu)]
    if strategy is InitStrategy.MOMENT_BASED:
        # log T is symmetric about log beta
        beta0 = math.exp(float(np.mean(np.log(t))))
        return [(beta0, fixed_nu if fixed_nu is not None else CLASSIC_NU)]
    beta0 = float(np.median(t))
    if fixed_nu is not None:
        return [(beta0, fixed_nu)]
    return [(beta0, nu) for nu in config.nu_grid]


def _run_starts(run: Callable[[FloatArray], Tuple[FloatArray, float, int, bool]],
                starts: List[FloatArray], config: OptimizerConfig
                ) -> List[Tuple[FloatArray, float, int, bool]]:
    workers = min(len(starts), default_worker_count(config.max_workers))
    if workers <= 1:
        return [run(x0) for x0 in starts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, starts))


def _best_index(outcomes: List[Tuple[FloatArray, float, int, bool]]) -> int:
    def key(i: int) -> Tuple[float, int]:
        f = outcomes[i][1]
        return (f if not math.isnan(f) else math.inf, i)

    return min(range(len(outcomes)), key=key)


def _scaled_score(t: FloatArray, params: NuBsParams,
                  fixed_nu: Optional[float]) -> Tuple[float, ...]:
    score = uni_score(t, params) * np.array(params.as_tuple()) / t.size
    if fixed_nu is not None:
        score = score[:2]
    return tuple(float(s) for s in score)


def fit_univariate(data: ArrayLike, config: Optional[OptimizerConfig] = None,
                   fixed_nu: Optional[float] = None) -> FitResult:
    """Maximum-likelihood fit of (alpha, beta, nu), or (alpha, beta) with nu fixed.

    Non-convergence is reported through FitResult.converged and a warning,
    never raised.
    """
    config = config or OptimizerConfig()
    t = _univariate_sample(data, MIN_UNIVARIATE_OBS)
    if fixed_nu is not None:
        fixed_nu = _check_nu(fixed_nu)

    objective = _ProfileObjective(t, fixed_nu)
    starts = [objective.pack(beta0, nu0) for beta0, nu0 in _univariate_starts(t, config, fixed_nu)]
    start_lls = tuple(-objective.value(x0) for x0 in starts)

    outcomes = _run_starts(
        lambda x0: _climb(objective.value, objective.gradient, x0, config), starts, config
    )
    for i, (x, f, nit, settled) in enumerate(outcomes):
        logger.debug(f"start {i}: loglik {start_lls[i]:.10g} -> {-f:.10g} "
                     f"after {nit} iterations (settled={settled})")
    best = _best_index(outcomes)
    x, _, n_iterations, settled = outcomes[best]

    params = objective.params(x)
    log_likelihood = uni_log_likelihood(t, params)
    residuals = _scaled_score(t, params, fixed_nu)
    converged = (
        settled
        and math.isfinite(log_likelihood)
        and max(abs(r) for r in residuals) < config.score_tolerance
    )
    k = 2 if fixed_nu is not None else 3
    aic, bic = information_criteria(log_likelihood, k, t.size)
    at_boundary = fixed_nu is None and params.nu < LOGNORMAL_LIMIT_NU

    if not converged:
        logger.warning(f"univariate fit did not converge: loglik {log_likelihood:.10g}, "
                       f"max |score residual| {max(abs(r) for r in residuals):.3g}")
    if at_boundary:
        logger.warning(f"likelihood still rising toward the lognormal limit (nu={params.nu:.3g})")

    return FitResult(
        params=params,
        log_likelihood=log_likelihood,
        converged=converged,
        n_iterations=n_iterations,
        score_residuals=residuals,
        aic=aic,
        bic=bic,
        n_obs=int(t.size),
        fixed_nu=fixed_nu,
        at_boundary=at_boundary,
        start_log_likelihoods=start_lls,
    )


def _paired_sample(data: ArrayLike, min_obs: int) -> FloatArray:
    d = np.asarray(data, dtype=float)
    if d.ndim != 2 or d.shape[1] != 2:
        raise DomainError(f"expected an n x 2 array, got shape {d.shape}")
    if d.shape[0] < min_obs:
        raise DomainError(f"need at least {min_obs} pairs, got {d.shape[0]}")
    return d


def biv_log_likelihood(data: ArrayLike, params: BivNuBsParams) -> float:
    """Sum over pairs of log phi_2(u, v; rho) plus both log Jacobians.

    Returns -inf when any entry is not a finite positive number.
    """
    d = _paired_sample(data, 1)
    if not (np.all(np.isfinite(d)) and np.all(d > 0.0)):
        return -math.inf
    n = d.shape[0]
    a1, b1, n1, a2, b2, n2, rho = params.as_tuple()
    one_minus_r2 = (1.0 - rho) * (1.0 + rho)
    l1 = np.log(d[:, 0]) - math.log(b1)
    l2 = np.log(d[:, 1]) - math.log(b2)
    with np.errstate(over="ignore", invalid="ignore"):
        u = uni.xi_from_log_ratio(l1, n1) / a1
        v = uni.xi_from_log_ratio(l2, n2) / a2
        quad = float(np.sum(u * u - 2.0 * rho * u * v + v * v))
        value = (
            n * (math.log(n1) + math.log(n2) - math.log(a1) - math.log(a2)
                 - math.log(b1) - math.log(b2) - LOG_2PI - 0.5 * math.log(one_minus_r2))
            - quad / (2.0 * one_minus_r2)
            + float(np.sum(uni.log_bracket(l1, n1)))
            + float(np.sum(uni.log_bracket(l2, n2)))
        )
    return value if not math.isnan(value) else -math.inf


def _biv_pack(params: BivNuBsParams) -> FloatArray:
    values = params.as_tuple()
    return np.array([math.log(v) for v in values[:6]] + [math.atanh(values[6])])


def _biv_unpack(x: FloatArray) -> BivNuBsParams:
    with np.errstate(over="ignore", under="ignore"):
        values = tuple(float(v) for v in np.exp(x[:6])) + (float(np.tanh(x[6])),)
    return BivNuBsParams.from_tuple(values)


def _central_gradient(func: Objective, x: FloatArray, step: float = GRADIENT_STEP) -> FloatArray:
    grad = np.empty_like(x)
    for i in range(x.size):
        h = step * max(1.0, abs(float(x[i])))
        shift = np.zeros_like(x)
        shift[i] = h
        grad[i] = (func(x + shift) - func(x - shift)) / (2.0 * h)
    return grad


def _bivariate_start(d: FloatArray, config: OptimizerConfig) -> BivNuBsParams:
    if config.init_strategy is InitStrategy.USER_SUPPLIED and isinstance(config.initial, BivNuBsParams):
        return config.initial
    margin_config = config
    if config.init_strategy is InitStrategy.USER_SUPPLIED:
        margin_config = replace(config, init_strategy=InitStrategy.GRID, initial=None)
    m1 = fit_univariate(d[:, 0], margin_config)
    m2 = fit_univariate(d[:, 1], margin_config)
    rho0 = biv_latent_correlation(d, BivNuBsParams(m1.params, m2.params, 0.0))
    rho0 = float(np.clip(rho0, -MAX_START_RHO, MAX_START_RHO))
    logger.debug(f"bivariate start: margins {m1.params}, {m2.params}; latent rho {rho0:.6f}")
    return BivNuBsParams(m1.params, m2.params, rho0)


def fit_bivariate(data: ArrayLike, config: Optional[OptimizerConfig] = None) -> FitResult:
    """Seven-parameter fit started from the two margin fits and the latent correlation."""
    config = config or OptimizerConfig()
    d = _paired_sample(data, MIN_BIVARIATE_OBS)
    for column in (0, 1):
        _univariate_sample(d[:, column], MIN_BIVARIATE_OBS)
    n = d.shape[0]
    start = _bivariate_start(d, config)

    def objective(x: FloatArray) -> float:
        try:
            params = _biv_unpack(x)
        except DomainError:
            return math.inf
        value = biv_log_likelihood(d, params)
        return -value if math.isfinite(value) else math.inf

    def gradient(x: FloatArray) -> FloatArray:
        grad = _central_gradient(objective, x)
        return grad if np.all(np.isfinite(grad)) else np.zeros_like(x)

    x, _, n_iterations, settled = _climb(objective, gradient, _biv_pack(start), config)
    params = _biv_unpack(x)
    log_likelihood = biv_log_likelihood(d, params)
    residuals = tuple(float(g) for g in -_central_gradient(objective, x) / n)
    converged = (
        settled
        and math.isfinite(log_likelihood)
        and all(math.isfinite(r) for r in residuals)
        and max(abs(r) for r in residuals) <= BIVARIATE_GRADIENT_TOLERANCE
    )
    aic, bic = information_criteria(log_likelihood, 7, n)
    if not converged:
        logger.warning(f"bivariate fit did not converge: loglik {log_likelihood:.10g}")

    return FitResult(
        params=params,
        log_likelihood=log_likelihood,
        converged=converged,
        n_iterations=n_iterations,
        score_residuals=residuals,
        aic=aic,
        bic=bic,
        n_obs=int(n),
        start_log_likelihoods=(biv_log_likelihood(d, start),),
    )


def _natural_objective(fit: FitResult, data: ArrayLike
                       ) -> Tuple[FloatArray, FloatArray, Objective]:
    """(theta, steps, negative log-likelihood) in the natural parameters."""
    if isinstance(fit.params, BivNuBsParams):
        d = _paired_sample(data, 1)
        theta = np.array(fit.params.as_tuple())
        steps = HESSIAN_RELATIVE_STEP * np.abs(theta)
        steps[6] = HESSIAN_RELATIVE_STEP

        def biv_negative(th: FloatArray) -> float:
            try:
                return -biv_log_likelihood(d, BivNuBsParams.from_tuple(tuple(th)))
            except DomainError:
                return math.inf

        return theta, steps, biv_negative

    t = np.asarray(data, dtype=float).reshape(-1)
    fixed_nu = fit.fixed_nu
    theta = np.array(fit.params.as_tuple()[: fit.n_params])

    def uni_negative(th: FloatArray) -> float:
        nu = fixed_nu if fixed_nu is not None else th[2]
        try:
            return -uni_log_likelihood(t, NuBsParams(th[0], th[1], nu))
        except DomainError:
            return math.inf

    return theta, HESSIAN_RELATIVE_STEP * np.abs(theta), uni_negative


def numeric_hessian(func: Objective, theta: FloatArray, steps: FloatArray) -> FloatArray:
    """Central-difference Hessian with one step per coordinate."""
    k = theta.size
    hessian = np.zeros((k, k))
    f0 = func(theta)
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = steps[i]
        hessian[i, i] = (func(theta + ei) + func(theta - ei) - 2.0 * f0) / steps[i] ** 2
        for j in range(i + 1, k):
            ej = np.zeros(k)
            ej[j] = steps[j]
            hessian[i, j] = hessian[j, i] = (
                func(theta + ei + ej)
                + func(theta - ei - ej)
                - func(theta - ei + ej)
                - func(theta + ei - ej)
            ) / (4.0 * steps[i] * steps[j])
    return hessian


def std_errors(fit: FitResult, data: ArrayLike) -> Tuple[float, ...]:
    """Square roots of the diagonal of the inverse observed information.

    Raises HessianError for unconverged fits and when the Hessian of the
    negative log-likelihood is not positive definite at the reported optimum.
    """
    if not fit.converged:
        raise HessianError("standard errors need a converged fit")
    theta, steps, negative = _natural_objective(fit, data)
    with np.errstate(all="ignore"):
        hessian = numeric_hessian(negative, theta, steps)
    if not np.all(np.isfinite(hessian)):
        raise HessianError("observed information has non-finite entries")
    try:
        lower = np.linalg.cholesky(hessian)
    except np.linalg.LinAlgError as e:
        raise HessianError(
            "observed information is not positive definite at the reported optimum"
        ) from e
    covariance = linalg.cho_solve((lower, True), np.eye(theta.size))
    return tuple(float(s) for s in np.sqrt(np.diag(covariance)))


def with_std_errors(fit: FitResult, data: ArrayLike) -> FitResult:
    """Copy of fit carrying standard errors, or unchanged when they are unavailable."""
    try:
        return replace(fit, std_errors=std_errors(fit, data))
    except HessianError as e:
        logger.warning(f"standard errors unavailable: {e}")
        return fit


@dataclass(frozen=True)
class ModelComparison:
    """Classic (nu = 1/2) against free-nu fits of the same sample."""

    classic: FitResult
    free: FitResult
    lr_statistic: float
    p_value: float
    preferred: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "classic": self.classic.to_dict(),
            "free": self.free.to_dict(),
            "lr_statistic": self.lr_statistic,
            "p_value": self.p_value,
            "preferred": self.preferred,
        }


def compare_models(data: ArrayLike, config: Optional[OptimizerConfig] = None) -> ModelComparison:
    """Fit both models and report 2 * (logL_free - logL_classic) against chi-square(1)."""
    config = config or OptimizerConfig()
    classic = fit_univariate(data, config, fixed_nu=CLASSIC_NU)
    free = fit_univariate(data, config)
    if free.log_likelihood < classic.log_likelihood:
        logger.debug("free-nu fit fell below the classic fit; restarting from the classic optimum")
        free = fit_univariate(data, config.starting_from(classic.params))

    lr = max(0.0, 2.0 * (free.log_likelihood - classic.log_likelihood))
    p_value = float(stats.chi2.sf(lr, df=1))
    preferred = "free" if free.aic < classic.aic else "classic"
    logger.info(f"model comparison: LR {lr:.6g}, p {p_value:.4g}, AIC prefers {preferred}")
    return ModelComparison(classic, free, lr, p_value, preferred)


__all__ = [
    "InitStrategy",
    "OptimizerConfig",
    "FitResult",
    "ModelComparison",
    "params_as_dict",
    "information_criteria",
    "uni_log_likelihood",
    "uni_score",
    "profile_alpha",
    "profile_log_likelihood",
    "fit_univariate",
    "biv_log_likelihood",
    "fit_bivariate",
    "numeric_hessian",
    "std_errors",
    "with_std_errors",
    "compare_models",
]
