"""
    @file:              exceptions.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the exception hierarchy raised by the package. The command-line interface
                        maps each family of errors to a fixed exit code.
"""

from typing import Any, Dict, Optional


class ConvexPSplineError(Exception):
    """
    Base class of every error raised on purpose by the package.
    """


class InvalidArgumentError(ConvexPSplineError, ValueError):
    """
    An argument is outside of its documented domain.
    """


class SampleTooSmallError(InvalidArgumentError):
    """
    The sample size is too small for the tuning rule or for the design.
    """


class FamilyTooSmallError(InvalidArgumentError):
    """
    The hypothesis family would contain fewer than two perturbed members.
    """


class InsufficientDataError(InvalidArgumentError):
    """
    Not enough rows to fit a rate.
    """


class ConfigError(InvalidArgumentError):
    """
    A configuration file is missing a key or holds an invalid value.
    """

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class DegenerateDesignError(ConvexPSplineError, ValueError):
    """
    The design matrix does not carry enough information (zero interior column sum, rank deficiency).
    """


class SolverError(ConvexPSplineError, RuntimeError):
    """
    Base class of quadratic program solver failures.
    """


class SolverStalledError(SolverError):
    """
    The active-set method exceeded its iteration limit.
    """

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NumericalBreakdownError(SolverError):
    """
    A factorization failed because the reduced matrix is not positive definite.
    """


class OracleInconsistencyError(SolverError):
    """
    No index set passed the KKT feasibility test during enumeration.
    """


class CertificateError(SolverError):
    """
    A solver returned coefficients that do not pass the KKT certificate.
    """

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class StudyInvalidError(ConvexPSplineError, RuntimeError):
    """
    Too many replicates of a risk study failed.
    """
