"""
    @file:              enumeration.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the brute-force solver, which enumerates every index set of active
                        convexity constraints and keeps the first one whose selection function passes the KKT
                        feasibility test. It is a correctness oracle for small K_n.
"""

import logging
from typing import Tuple

import numpy as np

from convexpspline.qp.base_solver import QPSolver
from convexpspline.qp.problem import DefaultParams, QPProblem, QPSolution, equality_multipliers, equality_solution
from convexpspline.utils.exceptions import InvalidArgumentError, OracleInconsistencyError

_logger = logging.getLogger(__name__)


def _index_set_from_mask(mask: int, num_constraints: int) -> Tuple[int, ...]:
    return tuple(i + 1 for i in range(num_constraints) if mask >> i & 1)


class EnumerationSolver(QPSolver):
    """
    Enumerates the 2^(K_n - 1) index sets in increasing bitmask order, so that the empty set comes first.
    """

    @property
    def name(self) -> str:
        return "enumeration"

    def solve(self, problem: QPProblem) -> QPSolution:
        K_n = problem.K_n
        if K_n > DefaultParams.ENUMERATION_MAX_K_N:
            raise InvalidArgumentError(
                f"Enumeration is limited to K_n <= {DefaultParams.ENUMERATION_MAX_K_N}, got K_n = {K_n}."
            )

        tol = problem.tolerance
        num_constraints = K_n - 1
        for mask in range(2 ** num_constraints):
            alpha = _index_set_from_mask(mask, num_constraints)
            b = equality_solution(problem, alpha)
            if np.min(problem.D2 @ b) < -tol:
                continue

            chi = equality_multipliers(problem, alpha, b)
            if np.min(chi) >= -tol:
                _logger.debug(f"Enumeration selected index set {alpha} after {mask + 1} candidates.")
                return self._build_solution(problem, b, alpha, mask + 1, chi=chi)

        raise OracleInconsistencyError(
            f"No index set out of {2 ** num_constraints} passed the KKT feasibility test for K_n = {K_n}."
        )


def brute_force_solve(problem: QPProblem) -> QPSolution:
    """
    Solve the quadratic program by enumerating every index set of active constraints.

    Parameters
    ----------
    problem : QPProblem
        Quadratic program with K_n <= 14.

    Returns
    -------
    solution : QPSolution
        First KKT-feasible candidate in increasing bitmask order.

    Raises
    ------
    OracleInconsistencyError
        If no candidate is feasible, which signals a bug when Lambda is positive definite.
    """
    return EnumerationSolver().solve(problem)
