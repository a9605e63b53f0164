"""
    @file:              base_solver.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the abstract class QPSolver. Every solver of the convexity-constrained
                        quadratic program inherits from it.
"""

from abc import ABC, abstractmethod
import logging
from typing import Tuple

import numpy as np

from convexpspline.qp.problem import (
    QPProblem,
    QPSolution,
    certify,
    equality_multipliers,
    kkt_report,
    reported_active_set
)
from convexpspline.utils.exceptions import CertificateError

_logger = logging.getLogger(__name__)


class QPSolver(ABC):
    """
    An abstract quadratic program solver.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """
        Solver name.

        Returns
        -------
        name : str
            Name recorded in the produced solutions.
        """
        raise NotImplementedError

    @abstractmethod
    def solve(self, problem: QPProblem) -> QPSolution:
        """
        Solve the quadratic program.

        Parameters
        ----------
        problem : QPProblem
            Quadratic program.

        Returns
        -------
        solution : QPSolution
            Optimal coefficients with their KKT certificate.
        """
        raise NotImplementedError

    def _build_solution(
            self,
            problem: QPProblem,
            b: np.ndarray,
            working_set: Tuple[int, ...],
            iterations: int,
            chi: np.ndarray = None
    ) -> QPSolution:
        if chi is None:
            chi = equality_multipliers(problem, working_set, b)

        solution = QPSolution(
            b_hat=b,
            chi=chi,
            active_set=reported_active_set(problem, b),
            residuals=kkt_report(problem, b, chi),
            iterations=iterations,
            solver=self.name
        )

        if not certify(problem, solution):
            raise CertificateError(
                f"The {self.name} solution does not pass the KKT certificate at tolerance {problem.tolerance:.3g}: "
                f"{solution.residuals}.",
                diagnostics=dict(
                    K_n=problem.K_n,
                    solver=self.name,
                    tolerance=problem.tolerance,
                    min_multiplier=float(np.min(chi)) if chi.size else 0.0,
                    **solution.residuals._asdict()
                )
            )

        _logger.debug(f"The {self.name} solution is certified after {iterations} iterations.")

        return solution
