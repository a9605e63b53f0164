"""
    @file:              problem.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the QPProblem and QPSolution classes of the convexity-constrained quadratic
                        program min 1/2 b^T Lambda b - b^T ybar subject to D2 b >= 0, together with the KKT residuals
                        and the equality-constrained subproblem shared by every solver.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, NamedTuple, Tuple

import numpy as np

from convexpspline.design.design_system import DesignSystem
from convexpspline.utils.banded import solve_spd_dense
from convexpspline.utils.exceptions import InvalidArgumentError
from convexpspline.utils.tools import as_index_set


class DefaultParams:
    RELATIVE_TOLERANCE = 1e-9
    ENUMERATION_MAX_K_N = 14


class KKTResiduals(NamedTuple):
    stationarity: float
    feasibility: float
    complementarity: float


@dataclass(frozen=True)
class QPProblem:
    """
    Quadratic program of a convex P-spline fit.

    Elements
    --------
    system : DesignSystem
        Design system holding Lambda.
    ybar : np.ndarray
        (K_n + 1,) weighted response X^T y / beta_n.
    """
    system: DesignSystem
    ybar: np.ndarray
    Lambda: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ybar = np.asarray(self.ybar, dtype=float)
        if ybar.shape != (self.system.K_n + 1,):
            raise InvalidArgumentError(
                f"ybar must have length K_n + 1 = {self.system.K_n + 1}, got an array of shape {ybar.shape}."
            )
        object.__setattr__(self, "ybar", ybar)
        object.__setattr__(self, "Lambda", self.system.Lambda)

    @property
    def K_n(self) -> int:
        return self.system.K_n

    @property
    def D2(self) -> np.ndarray:
        return self.system.D2

    @property
    def tolerance(self) -> float:
        """
        Absolute tolerance 1e-9 (1 + ||ybar||_inf) used for every KKT condition.
        """
        return DefaultParams.RELATIVE_TOLERANCE * (1.0 + float(np.max(np.abs(self.ybar))))

    @classmethod
    def from_response(cls, system: DesignSystem, y: np.ndarray) -> "QPProblem":
        return cls(system=system, ybar=system.weighted_response(y))


@dataclass(frozen=True)
class QPSolution:
    """
    Solution of the quadratic program with its KKT certificate.

    Elements
    --------
    b_hat : np.ndarray
        (K_n + 1,) optimal coefficients.
    chi : np.ndarray
        (K_n - 1,) multipliers of the constraints D2 b >= 0.
    active_set : Tuple[int, ...]
        1-based indices i with (D2 b_hat)_i <= tolerance.
    residuals : KKTResiduals
        Stationarity, minimum primal slack and complementarity.
    iterations : int
        Number of working-set changes (active set) or candidates visited (enumeration).
    solver : str
        Name of the solver that produced the solution.
    """
    b_hat: np.ndarray
    chi: np.ndarray
    active_set: Tuple[int, ...]
    residuals: KKTResiduals
    iterations: int
    solver: str

    def to_dict(self) -> Dict:
        return dict(
            b_hat=self.b_hat,
            chi=self.chi,
            active_set=list(self.active_set),
            residuals=self.residuals._asdict(),
            iterations=self.iterations,
            solver=self.solver
        )


def objective(problem: QPProblem, b: np.ndarray) -> float:
    """
    Objective 1/2 b^T Lambda b - b^T ybar.
    """
    return float(0.5 * b @ problem.Lambda @ b - b @ problem.ybar)


def kkt_report(
        problem: QPProblem,
        candidate: np.ndarray,
        chi: np.ndarray
) -> KKTResiduals:
    """
    KKT residuals of a candidate pair (b, chi).

    Parameters
    ----------
    problem : QPProblem
        Quadratic program.
    candidate : np.ndarray
        (K_n + 1,) coefficients.
    chi : np.ndarray
        (K_n - 1,) multipliers.

    Returns
    -------
    residuals : KKTResiduals
        ||Lambda b - ybar - D2^T chi||_inf, min_i (D2 b)_i and |chi^T D2 b|.
    """
    candidate = np.asarray(candidate, dtype=float)
    chi = np.asarray(chi, dtype=float)
    if candidate.shape != (problem.K_n + 1,) or chi.shape != (problem.K_n - 1,):
        raise InvalidArgumentError(
            f"Expected vectors of lengths {problem.K_n + 1} and {problem.K_n - 1}, got {candidate.shape} and "
            f"{chi.shape}."
        )

    D2 = problem.D2
    slack = D2 @ candidate

    return KKTResiduals(
        stationarity=float(np.max(np.abs(problem.Lambda @ candidate - problem.ybar - D2.T @ chi))),
        feasibility=float(np.min(slack)),
        complementarity=float(abs(chi @ slack))
    )


def certify(problem: QPProblem, solution: QPSolution) -> bool:
    """
    Whether the solution satisfies stationarity, primal and dual feasibility and complementarity at the problem
    tolerance.
    """
    tol = problem.tolerance
    residuals = kkt_report(problem, solution.b_hat, solution.chi)

    return (
        residuals.stationarity <= tol
        and residuals.feasibility >= -tol
        and residuals.complementarity <= tol
        and bool(np.all(solution.chi >= -tol))
    )


def reported_active_set(problem: QPProblem, b: np.ndarray) -> Tuple[int, ...]:
    slack = problem.D2 @ b

    return tuple(int(i) + 1 for i in np.flatnonzero(slack <= problem.tolerance))


def free_nodes(alpha: Tuple[int, ...], K_n: int) -> Tuple[int, ...]:
    """
    Nodes 1..K_n + 1 that are not basic. Constraint i of D2 ties node i + 1 to its neighbours, so the basic nodes are
    {i + 1 : i in alpha}.
    """
    basic = {i + 1 for i in alpha}

    return tuple(node for node in range(1, K_n + 2) if node not in basic)


@lru_cache(maxsize=4096)
def _cached_selection_matrix(alpha: Tuple[int, ...], K_n: int) -> np.ndarray:
    nodes = np.asarray(free_nodes(alpha, K_n), dtype=float)
    integers = np.arange(1, K_n + 2, dtype=float)
    F = np.vstack([np.interp(integers, nodes, unit) for unit in np.eye(nodes.size)])
    F.setflags(write=False)

    return F


def selection_matrix(alpha, K_n: int) -> np.ndarray:
    """
    Matrix F whose rows are the hat functions on the free nodes evaluated at the integers 1..K_n + 1. Its rows span
    the null space of the constraints indexed by alpha.

    Parameters
    ----------
    alpha : Iterable[int]
        1-based constraint indices, subset of 1..K_n - 1.
    K_n : int
        Number of intervals.

    Returns
    -------
    F : np.ndarray
        Read-only (l, K_n + 1) matrix, l being the number of free nodes.
    """
    return _cached_selection_matrix(as_index_set(alpha, K_n - 1), int(K_n))


def equality_solution(problem: QPProblem, alpha: Tuple[int, ...]) -> np.ndarray:
    """
    Minimizer of the objective under (D2 b)_i = 0 for i in alpha, i.e. F^T (F Lambda F^T)^{-1} F ybar.
    """
    F = selection_matrix(alpha, problem.K_n)
    reduced = F @ problem.Lambda @ F.T

    return F.T @ solve_spd_dense(reduced, F @ problem.ybar, bandwidth=2)


def equality_multipliers(problem: QPProblem, alpha: Tuple[int, ...], b: np.ndarray) -> np.ndarray:
    """
    Multipliers chi supported on alpha that best satisfy Lambda b - ybar = D2^T chi.
    """
    chi = np.zeros(problem.K_n - 1)
    if not alpha:
        return chi

    rows = np.asarray(alpha) - 1
    D2_alpha = problem.D2[rows]
    chi[rows] = solve_spd_dense(
        D2_alpha @ D2_alpha.T,
        D2_alpha @ (problem.Lambda @ b - problem.ybar),
        bandwidth=2
    )

    return chi
