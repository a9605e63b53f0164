"""
    @file:              solver_strategy.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the class QPSolverStrategies that enumerates the available quadratic program
                        solvers.
"""

import enum
from typing import Callable, List, NamedTuple

from convexpspline.qp.active_set import ActiveSetSolver
from convexpspline.qp.enumeration import EnumerationSolver
from convexpspline.utils.exceptions import InvalidArgumentError


class QPSolverStrategy(NamedTuple):
    name: str
    factory: Callable


class QPSolverStrategies(enum.Enum):

    ACTIVE_SET = QPSolverStrategy(
        name="active_set",
        factory=ActiveSetSolver
    )

    ENUMERATION = QPSolverStrategy(
        name="enumeration",
        factory=EnumerationSolver
    )

    @classmethod
    def get_available_names(cls) -> List[str]:
        """
        Available solver names.

        Returns
        -------
        available_names : List[str]
            Available names.
        """
        return [member.value.name for member in cls]

    @classmethod
    def from_name(cls, name: str) -> "QPSolverStrategies":
        """
        Strategy with the given name.

        Parameters
        ----------
        name : str
            Solver name, one of get_available_names().

        Returns
        -------
        strategy : QPSolverStrategies
            Matching strategy.
        """
        for member in cls:
            if member.value.name == name:
                return member

        raise InvalidArgumentError(f"Unknown solver {name!r}. Available solvers are {cls.get_available_names()}.")

    def create_solver(self):
        return self.value.factory()
