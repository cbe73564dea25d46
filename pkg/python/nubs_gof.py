#!/usr/bin/env python3
"""
Kolmogorov-Smirnov goodness of fit for univariate nu-BS models
The asymptotic p-value uses the Kolmogorov law of sqrt(n) * D_n; the
parametric bootstrap refits every simulated sample so that estimated
parameters are accounted for.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.special import kolmogorov

from normal_kernel import ArrayLike, FloatArray
from nubs_config import default_worker_count, get_logger
from nubs_errors import DomainError, NuBsError
from nubs_estimation import MIN_UNIVARIATE_OBS, OptimizerConfig, fit_univariate
import nubs_univariate as uni
from nubs_univariate import NuBsParams

logger = get_logger("gof")


@dataclass(frozen=True)
class GofReport:
    """Raw statistic D_n, the scaled statistic sqrt(n) * D_n, and their p-values."""

    d_statistic: float
    scaled_statistic: float
    p_asymptotic: float
    n_obs: int
    p_bootstrap: Optional[float] = None
    n_boot: Optional[int] = None
    n_skipped: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d_statistic": self.d_statistic,
            "scaled_statistic": self.scaled_statistic,
            "p_asymptotic": self.p_asymptotic,
            "p_bootstrap": self.p_bootstrap,
            "n_obs": self.n_obs,
            "n_boot": self.n_boot,
            "n_skipped": self.n_skipped,
        }


def ks_statistic(data: ArrayLike, cdf_eval: Callable[[FloatArray], ArrayLike]) -> float:
    """D_n = max_i max(i/n - F(t_(i)), F(t_(i)) - (i-1)/n).

    cdf_eval is called once on the sorted sample and must accept an array.
    """
    t = np.sort(np.asarray(data, dtype=float).reshape(-1), kind="stable")
    n = t.size
    if n == 0:
        raise DomainError("KS statistic of an empty sample")
    cdf_values = np.asarray(cdf_eval(t), dtype=float).reshape(-1)
    d_plus = np.max(np.arange(1.0, n + 1) / n - cdf_values)
    d_minus = np.max(cdf_values - np.arange(0.0, n) / n)
    return float(max(d_plus, d_minus))


def kolmogorov_pvalue(scaled_statistic: float) -> float:
    """Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2), the Kolmogorov survival function."""
    lam = float(scaled_statistic)
    if not lam >= 0.0:
        raise DomainError(f"scaled statistic must be >= 0, got {scaled_statistic!r}")
    return float(min(1.0, max(0.0, kolmogorov(lam))))


def _replicate_statistic(params: NuBsParams, n: int, seed: int, config: OptimizerConfig,
                         fixed_nu: Optional[float]) -> Optional[float]:
    """KS statistic of one simulated sample against its own refit; None when the refit fails."""
    sample = uni.sample(params, n, seed)
    try:
        fit = fit_univariate(sample, config, fixed_nu=fixed_nu)
    except NuBsError as e:
        logger.debug(f"bootstrap replicate (seed {seed}) skipped: {e}")
        return None
    if not fit.converged:
        logger.debug(f"bootstrap replicate (seed {seed}) skipped: refit did not converge")
        return None
    return ks_statistic(sample, lambda x: uni.cdf(x, fit.params))


def gof_test(data: ArrayLike, params: NuBsParams, n_boot: int, seed: int,
             config: Optional[OptimizerConfig] = None,
             fixed_nu: Optional[float] = None) -> GofReport:
    """KS test of data against cdf(., params).

    n_boot = 0 skips the bootstrap. Replicate seeds are spawned from `seed`,
    so p_bootstrap does not depend on thread scheduling.
    """
    t = np.asarray(data, dtype=float).reshape(-1)
    if t.size == 0 or not (np.all(np.isfinite(t)) and np.all(t > 0.0)):
        raise DomainError("goodness of fit needs a nonempty sample of positive observations")
    if n_boot < 0:
        raise DomainError(f"n_boot must be >= 0, got {n_boot}")
    n = int(t.size)

    d_statistic = ks_statistic(t, lambda x: uni.cdf(x, params))
    scaled = math.sqrt(n) * d_statistic
    p_asymptotic = kolmogorov_pvalue(scaled)
    logger.debug(f"KS: D={d_statistic:.6g}, sqrt(n)D={scaled:.6g}, p={p_asymptotic:.6g}")
    if n_boot == 0:
        return GofReport(d_statistic, scaled, p_asymptotic, n)

    if n < MIN_UNIVARIATE_OBS:
        raise DomainError(f"bootstrap refits need at least {MIN_UNIVARIATE_OBS} observations")
    refit_config = (config or OptimizerConfig()).starting_from(params)
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n_boot)]

    def replicate(replicate_seed: int) -> Optional[float]:
        return _replicate_statistic(params, n, replicate_seed, refit_config, fixed_nu)

    workers = default_worker_count(refit_config.max_workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        statistics = list(pool.map(replicate, seeds))

    valid = [s for s in statistics if s is not None]
    n_skipped = n_boot - len(valid)
    if n_skipped:
        logger.warning(f"{n_skipped} of {n_boot} bootstrap refits failed and were skipped")
    p_bootstrap = sum(1 for s in valid if s >= d_statistic) / len(valid) if valid else None

    return GofReport(
        d_statistic=d_statistic,
        scaled_statistic=scaled,
        p_asymptotic=p_asymptotic,
        n_obs=n,
        p_bootstrap=p_bootstrap,
        n_boot=n_boot,
        n_skipped=n_skipped,
    )
