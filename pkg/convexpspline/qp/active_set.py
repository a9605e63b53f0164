"""
    @file:              active_set.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the primal active-set solver of the convexity-constrained quadratic
                        program. Each working set is handled through its selection function, so the final working set
                        is directly comparable to the index sets enumerated by the brute-force solver.
"""

import logging
from typing import List, Tuple

import numpy as np

from convexpspline.qp.base_solver import QPSolver
from convexpspline.qp.problem import QPProblem, QPSolution, equality_multipliers, equality_solution, objective
from convexpspline.utils.exceptions import SolverStalledError

_logger = logging.getLogger(__name__)


class ActiveSetSolver(QPSolver):
    """
    Primal active-set method. The start point is the unconstrained minimizer, made feasible by activating the
    violated constraints until the equality-constrained minimizer satisfies every constraint. Ties are broken toward
    the smallest constraint index.
    """

    @property
    def name(self) -> str:
        return "active_set"

    @staticmethod
    def max_iterations(K_n: int) -> int:
        return 10 * K_n + 100

    def _stall(self, problem: QPProblem, b: np.ndarray, working_set: List[int], iterations: int):
        diagnostics = dict(
            K_n=problem.K_n,
            iterations=iterations,
            working_set=list(working_set),
            objective=objective(problem, b),
            min_slack=float(np.min(problem.D2 @ b))
        )
        raise SolverStalledError(
            f"Active-set method exceeded {self.max_iterations(problem.K_n)} working-set changes.",
            diagnostics=diagnostics
        )

    def _feasible_start(self, problem: QPProblem) -> Tuple[np.ndarray, List[int], int]:
        tol = problem.tolerance
        working_set: List[int] = []
        changes = 0
        while True:
            b = equality_solution(problem, tuple(working_set))
            violated = [int(i) + 1 for i in np.flatnonzero(problem.D2 @ b < -tol) if int(i) + 1 not in working_set]
            if not violated:
                return b, working_set, changes

            working_set = sorted(working_set + violated)
            changes += len(violated)

    def solve(self, problem: QPProblem) -> QPSolution:
        D2 = problem.D2
        tol = problem.tolerance
        max_iterations = self.max_iterations(problem.K_n)

        b, working_set, changes = self._feasible_start(problem)
        current_objective = objective(problem, b)

        while True:
            if changes > max_iterations:
                self._stall(problem, b, working_set, changes)

            target = equality_solution(problem, tuple(working_set))
            step = target - b

            if np.max(np.abs(step)) <= 1e-13 * (1.0 + np.max(np.abs(b))):
                chi = equality_multipliers(problem, tuple(working_set), b)
                if not working_set or np.min(chi[np.asarray(working_set) - 1]) >= -tol:
                    break

                values = chi[np.asarray(working_set) - 1]
                leaving = working_set[int(np.argmin(values))]
                working_set.remove(leaving)
                changes += 1
                _logger.debug(f"Releasing constraint {leaving} (multiplier {np.min(values):.3e}).")
                continue

            slack = D2 @ b
            direction = D2 @ step
            blocking = [
                i for i in range(problem.K_n - 1)
                if (i + 1) not in working_set and direction[i] < 0.0
            ]

            step_length, entering = 1.0, None
            if blocking:
                ratios = np.maximum(0.0, -slack[blocking] / direction[blocking])
                position = int(np.argmin(ratios))
                if ratios[position] < 1.0:
                    step_length, entering = float(ratios[position]), blocking[position] + 1

            b = target if entering is None else b + step_length * step

            new_objective = objective(problem, b)
            assert new_objective <= current_objective + 1e-12 * (1.0 + abs(current_objective)), (
                f"Objective increased from {current_objective} to {new_objective}."
            )
            current_objective = new_objective

            if entering is not None:
                working_set = sorted(working_set + [entering])
                changes += 1
                _logger.debug(f"Activating constraint {entering} after a step of length {step_length:.3e}.")

        return self._build_solution(problem, b, tuple(working_set), changes, chi=chi)


def solve(problem: QPProblem) -> QPSolution:
    """
    Solve the convexity-constrained quadratic program with the primal active-set method.

    Parameters
    ----------
    problem : QPProblem
        Quadratic program, Lambda positive definite.

    Returns
    -------
    solution : QPSolution
        Unique minimizer with its multipliers and KKT residuals.

    Raises
    ------
    SolverStalledError
        If more than 10 K_n + 100 working-set changes are needed.
    NumericalBreakdownError
        If a reduced matrix is not positive definite.
    CertificateError
        If the returned coefficients fail the KKT certificate.
    """
    return ActiveSetSolver().solve(problem)
