#!/usr/bin/env python3
"""
Exception hierarchy for the nu-Birnbaum-Saunders toolkit
"""

from typing import Optional


class NuBsError(Exception):
    """Base class for all toolkit errors."""


class DomainError(NuBsError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotPositiveDefiniteError(NuBsError, ValueError):
    """A matrix factorization met a nonpositive pivot."""


class QuadratureConvergenceError(NuBsError, ArithmeticError):
    """Doubling the quadrature nodes moved the result too much."""

    def __init__(self, message: str, coarse: float, fine: float) -> None:
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class SurvivalUnderflowError(NuBsError, ArithmeticError):
    """The survival function underflowed, so the hazard is not representable."""


class HessianError(NuBsError, ArithmeticError):
    """Observed information could not be inverted at the reported optimum."""


class DatasetError(NuBsError):
    """Base class for data ingestion problems."""


class DatasetReadError(DatasetError, OSError):
    """The data file could not be opened or decoded."""


class DatasetParseError(DatasetError, ValueError):
    """A token in the data file is not a decimal number."""

    def __init__(self, token: str, line: int, column: int, path: Optional[str] = None) -> None:
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{column}: not a number: {token!r}")
        self.token = token
        self.line = line
        self.column = column


class NonPositiveValueError(DatasetError, ValueError):
    """A parsed value is zero or negative; index is 1-based."""

    def __init__(self, value: float, index: int) -> None:
        super().__init__(f"value #{index} is not strictly positive: {value!r}")
        self.value = value
        self.index = index


class NonFiniteValueError(DatasetError, ValueError):
    """A parsed value overflowed to infinity; index is 1-based."""

    def __init__(self, value: float, index: int) -> None:
        super().__init__(f"value #{index} is not finite: {value!r}")
        self.value = value
        self.index = index


class UsageError(NuBsError):
    """Command-line misuse; carries the offending flag when known."""

    def __init__(self, message: str, flag: Optional[str] = None) -> None:
        super().__init__(message)
        self.flag = flag
