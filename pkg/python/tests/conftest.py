"""
Shared fixtures for the toolkit tests
"""

import math
import os
import sys
from typing import Callable, Tuple

import numpy as np
import pytest
from scipy.optimize import brentq

# Add the module directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from nubs_datasets import embedded_table1  # noqa: E402
from nubs_univariate import NuBsParams  # noqa: E402

# Twelve (alpha, beta, nu) sets spanning narrow to wide, small to large exponents
PARAMETER_GRID = [
    NuBsParams(0.1, 1.0, 0.5),
    NuBsParams(0.5, 1.0, 0.5),
    NuBsParams(1.0, 2.0, 0.5),
    NuBsParams(2.0, 0.5, 0.5),
    NuBsParams(0.3, 3.0, 0.25),
    NuBsParams(1.5, 1.0, 0.25),
    NuBsParams(0.5, 10.0, 1.0),
    NuBsParams(2.0, 1.0, 1.0),
    NuBsParams(0.2, 0.1, 2.0),
    NuBsParams(1.0, 5.0, 2.0),
    NuBsParams(0.8, 2.0, 0.75),
    NuBsParams(3.0, 1.0, 4.0),
]


@pytest.fixture
def table1() -> np.ndarray:
    return embedded_table1().values


@pytest.fixture
def classic_bs_oracle() -> Callable[[np.ndarray], Tuple[float, float]]:
    """Two-parameter BS maximum likelihood from its one-dimensional beta equation.

    beta^2 - beta (2r + K(beta)) + r (s + K(beta)) = 0 with s the arithmetic
    mean, r the harmonic mean and K(x) the harmonic mean of x + t_i; the root
    lies between r and s. Then alpha = sqrt(s/beta + beta/r - 2).
    """

    def fit(data: np.ndarray) -> Tuple[float, float]:
        t = np.asarray(data, dtype=float)
        s = float(np.mean(t))
        r = 1.0 / float(np.mean(1.0 / t))

        def k(x: float) -> float:
            return 1.0 / float(np.mean(1.0 / (x + t)))

        def equation(beta: float) -> float:
            return beta * beta - beta * (2.0 * r + k(beta)) + r * (s + k(beta))

        beta = brentq(equation, r, s, xtol=1e-14, rtol=1e-15)
        return math.sqrt(s / beta + beta / r - 2.0), beta

    return fit
