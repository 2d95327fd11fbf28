#!/usr/bin/env python3
"""Custom exceptions for the QoS provisioning toolkit."""

from typing import Any


class QoSProvisioningError(Exception):
    """Base exception for QoS provisioning errors."""


class InvalidParameterError(QoSProvisioningError, ValueError):
    """Raised when a model parameter violates its domain."""

    def __init__(
        self,
        message: str,
        parameter: str | None = None,
        value: Any = None,
    ):
        """Initialize the InvalidParameterError.

        Args:
            message: Error message.
            parameter: Name of the offending parameter.
            value: Value that was rejected.
        """
        self.parameter = parameter
        self.value = value

        if parameter is not None:
            message = f"{parameter}={value!r}: {message}"

        super().__init__(message)


class DegenerateChainError(InvalidParameterError):
    """Raised when a Markov chain has no unique stationary distribution."""


class NoSolutionError(QoSProvisioningError):
    """Raised when a matching or inversion problem has no solution."""


class InfeasibleTargetError(NoSolutionError):
    """Raised when a delay-violation target cannot be reached."""


class DegenerateOptimumError(NoSolutionError):
    """Raised when the best fixed rate yields a vanishing effective capacity."""

    def __init__(self, message: str, r_star: float, c_e_star: float):
        """Initialize the DegenerateOptimumError.

        Args:
            message: Error message.
            r_star: Best rate found by the search.
            c_e_star: Effective capacity at that rate.
        """
        self.r_star = r_star
        self.c_e_star = c_e_star
        super().__init__(f"{message} (R*={r_star:.6g}, C_E*={c_e_star:.3g})")


class NumericalFailureError(QoSProvisioningError):
    """Raised when a numerical procedure fails to converge or overflows."""


class BracketFailureError(NumericalFailureError):
    """Raised when a root or optimum bracket is invalid."""

    def __init__(
        self,
        message: str,
        lower: float,
        upper: float,
        f_lower: float | None = None,
        f_upper: float | None = None,
    ):
        """Initialize the BracketFailureError.

        Args:
            message: Error message.
            lower: Lower bracket endpoint.
            upper: Upper bracket endpoint.
            f_lower: Function value at the lower endpoint.
            f_upper: Function value at the upper endpoint.
        """
        self.lower = lower
        self.upper = upper
        self.f_lower = f_lower
        self.f_upper = f_upper
        super().__init__(
            f"{message} (bracket [{lower:.6g}, {upper:.6g}], "
            f"f=[{f_lower!r}, {f_upper!r}])"
        )
