"""
    @file:              design_system.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the DesignSystem class, which gathers the design matrix of the linear
                        B-spline basis, its normalized Gram matrix, the second-order difference operator and the
                        penalized system matrix of the convex P-spline quadratic program.
"""

from dataclasses import dataclass
import logging
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.linalg import LinAlgError, cholesky_banded, eigvals_banded

from convexpspline.design.knots import KnotGrid, basis_matrix, build_knots
from convexpspline.utils.banded import dense_to_lower_banded, lower_banded_to_dense
from convexpspline.utils.exceptions import DegenerateDesignError, InvalidArgumentError, SampleTooSmallError

_logger = logging.getLogger(__name__)


def difference_matrix(K_n: int) -> np.ndarray:
    """
    Second-order difference matrix, whose row i holds the stencil (1, -2, 1) at columns i, i + 1, i + 2.

    Parameters
    ----------
    K_n : int
        Number of intervals, at least 2.

    Returns
    -------
    D2 : np.ndarray
        (K_n - 1, K_n + 1) matrix.
    """
    if K_n < 2:
        raise InvalidArgumentError(f"K_n must be at least 2, got {K_n}.")

    return np.diff(np.eye(K_n + 1), n=2, axis=0)


def penalty_banded(K_n: int) -> np.ndarray:
    """
    D2^T D2 in lower banded storage (3 rows).
    """
    D2 = difference_matrix(K_n)

    return dense_to_lower_banded(D2.T @ D2, bandwidth=2)


@dataclass(frozen=True)
class DesignSystem:
    """
    Design of a convex linear P-spline fit.

    Elements
    --------
    grid : KnotGrid
        Knot grid.
    n : int
        Sample size.
    x : np.ndarray
        Design points.
    X : sparse.csr_matrix
        (n, K_n + 1) design matrix [B_k(x_i)].
    beta_n : float
        Interior squared column sum of X (mean over interior columns when they differ).
    alpha_n : float
        Mean of the two boundary squared column sums.
    gamma_n : float
        Mean inner product of adjacent columns.
    lambda_star : float
        Unnormalized penalty.
    gamma_banded : np.ndarray
        Gamma = X^T X / beta_n in lower banded storage (3 rows, the last one is zero).
    lambda_banded : np.ndarray
        Lambda = Gamma + lambda D2^T D2 in lower banded storage (3 rows).
    simulation_mode : bool
        Whether the design points are i / n with n / K_n an integer.
    """
    grid: KnotGrid
    n: int
    x: np.ndarray
    X: sparse.csr_matrix
    beta_n: float
    alpha_n: float
    gamma_n: float
    lambda_star: float
    gamma_banded: np.ndarray
    lambda_banded: np.ndarray
    simulation_mode: bool

    @property
    def K_n(self) -> int:
        return self.grid.K_n

    @property
    def M_n(self) -> float:
        return self.n / self.grid.K_n

    @property
    def lam(self) -> float:
        """
        Normalized penalty lambda = lambda_star / beta_n.
        """
        return self.lambda_star / self.beta_n

    @property
    def theta_n(self) -> float:
        return self.alpha_n / self.beta_n

    @property
    def eta_n(self) -> float:
        return self.gamma_n / self.beta_n

    @property
    def Gamma(self) -> np.ndarray:
        return lower_banded_to_dense(self.gamma_banded)

    @property
    def D2(self) -> np.ndarray:
        return difference_matrix(self.grid.K_n)

    @property
    def Lambda(self) -> np.ndarray:
        return lower_banded_to_dense(self.lambda_banded)

    @property
    def rho_n(self) -> float:
        """
        ||X^T||_inf / beta_n.
        """
        return float(np.max(np.asarray(self.X.sum(axis=0)))) / self.beta_n

    def weighted_response(self, y: np.ndarray) -> np.ndarray:
        """
        Weighted response ybar = X^T y / beta_n.

        Parameters
        ----------
        y : np.ndarray
            (n,) responses.

        Returns
        -------
        ybar : np.ndarray
            (K_n + 1,) vector.
        """
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n,):
            raise InvalidArgumentError(f"Expected {self.n} responses, got an array of shape {y.shape}.")

        return np.asarray(self.X.T @ y).ravel() / self.beta_n

    def with_lambda_star(self, lambda_star: float) -> "DesignSystem":
        """
        Same design with another penalty.
        """
        if lambda_star < 0:
            raise InvalidArgumentError(f"lambda_star must be nonnegative, got {lambda_star}.")

        return DesignSystem(
            grid=self.grid,
            n=self.n,
            x=self.x,
            X=self.X,
            beta_n=self.beta_n,
            alpha_n=self.alpha_n,
            gamma_n=self.gamma_n,
            lambda_star=float(lambda_star),
            gamma_banded=self.gamma_banded,
            lambda_banded=self.gamma_banded + (lambda_star / self.beta_n) * penalty_banded(self.grid.K_n),
            simulation_mode=self.simulation_mode
        )


def build_design(
        grid: KnotGrid,
        n: int,
        lambda_star: float,
        x: Optional[np.ndarray] = None
) -> DesignSystem:
    """
    Build the design matrix, its Gram summary and the penalized system matrix.

    Without explicit design points, x_i = i / n and the design is in simulation mode, which requires n / K_n to be an
    integer. With explicit points (real-data mode), any n >= K_n + 2 is accepted; Gamma is computed from X itself and
    the Gram summaries no longer have their closed forms.

    Parameters
    ----------
    grid : KnotGrid
        Knot grid.
    n : int
        Sample size.
    lambda_star : float
        Unnormalized penalty, lambda = lambda_star / beta_n.
    x : Optional[np.ndarray]
        Design points in [0, 1]. Defaults to i / n, i = 1, ..., n.

    Returns
    -------
    system : DesignSystem
        Design system.
    """
    K_n = grid.K_n
    if lambda_star < 0 or not np.isfinite(lambda_star):
        raise InvalidArgumentError(f"lambda_star must be a finite nonnegative number, got {lambda_star}.")

    if x is None:
        if n < 2 * K_n:
            raise SampleTooSmallError(f"Simulation mode needs n >= 2 K_n = {2 * K_n}, got n = {n}.")
        if n % K_n != 0:
            raise InvalidArgumentError(
                f"Simulation mode needs n / K_n to be an integer, got n = {n} and K_n = {K_n}. Pass the design points "
                f"explicitly to use the real-data mode."
            )
        points = np.arange(1, n + 1, dtype=float) / n
        simulation_mode = True
    else:
        points = np.asarray(x, dtype=float).ravel()
        if points.size != n:
            raise InvalidArgumentError(f"Expected {n} design points, got {points.size}.")
        if n < K_n + 2:
            raise SampleTooSmallError(f"Real-data mode needs n >= K_n + 2 = {K_n + 2}, got n = {n}.")
        simulation_mode = False
        _logger.warning(
            f"Real-data mode with n = {n} and K_n = {K_n}: the Gram matrix is computed from the design points and the "
            f"closed-form limits of theta_n and eta_n do not apply."
        )

    X = basis_matrix(grid, points)
    gram = (X.T @ X).toarray()
    squared_sums = np.diag(gram)

    beta_n = float(np.mean(squared_sums[1:-1]))
    if beta_n <= 0.0:
        raise DegenerateDesignError(f"The interior squared column sum of the design is {beta_n}.")
    if np.any(squared_sums <= 0.0):
        empty = [int(k) + 1 for k in np.flatnonzero(squared_sums <= 0.0)]
        raise DegenerateDesignError(f"Basis functions {empty} vanish at every design point.")

    alpha_n = float(np.mean(squared_sums[[0, -1]]))
    gamma_n = float(np.mean(np.diagonal(gram, offset=1)))

    gamma_banded = dense_to_lower_banded(gram / beta_n, bandwidth=2)
    try:
        cholesky_banded(gamma_banded, lower=True)
    except LinAlgError as error:
        raise DegenerateDesignError(f"The Gram matrix of the design is singular: {error}.") from error

    lambda_banded = gamma_banded + (lambda_star / beta_n) * penalty_banded(K_n)

    _logger.info(
        f"Built design with K_n = {K_n}, n = {n}, beta_n = {beta_n:.6g}, lambda = {lambda_star / beta_n:.6g} "
        f"({'simulation' if simulation_mode else 'real-data'} mode)."
    )

    return DesignSystem(
        grid=grid,
        n=int(n),
        x=points,
        X=X,
        beta_n=beta_n,
        alpha_n=alpha_n,
        gamma_n=gamma_n,
        lambda_star=float(lambda_star),
        gamma_banded=gamma_banded,
        lambda_banded=lambda_banded,
        simulation_mode=simulation_mode
    )


def gamma_min_eigenvalue(system: DesignSystem) -> float:
    """
    Smallest eigenvalue of Gamma.
    """
    return float(eigvals_banded(system.gamma_banded, lower=True, select="i", select_range=(0, 0))[0])


def beta_constant_scan(
        K_n_list: Sequence[int],
        M_n_list: Sequence[int]
) -> pd.DataFrame:
    """
    Scan beta_n K_n / n and the smallest eigenvalue of Gamma over simulation-mode designs.

    Parameters
    ----------
    K_n_list : Sequence[int]
        Numbers of intervals.
    M_n_list : Sequence[int]
        Values of n / K_n.

    Returns
    -------
    table : pd.DataFrame
        One row per (K_n, M_n) with columns K_n, M_n, n, beta_ratio, theta_n, eta_n, min_eigenvalue. The infimum of
        beta_ratio is the empirical C_beta.
    """
    rows = []
    for K_n in K_n_list:
        grid = build_knots(K_n)
        for M_n in M_n_list:
            system = build_design(grid, K_n * M_n, lambda_star=0.0)
            rows.append(
                dict(
                    K_n=K_n,
                    M_n=M_n,
                    n=system.n,
                    beta_ratio=system.beta_n * K_n / system.n,
                    theta_n=system.theta_n,
                    eta_n=system.eta_n,
                    min_eigenvalue=gamma_min_eigenvalue(system)
                )
            )

    return pd.DataFrame(rows)
