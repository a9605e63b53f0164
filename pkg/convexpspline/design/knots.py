"""
    @file:              knots.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the KnotGrid class and the evaluation of the linear B-spline (hat function)
                        basis on uniform knots.
"""

from dataclasses import dataclass
import numbers
from typing import Union

import numpy as np
from scipy import sparse

from convexpspline.utils.exceptions import InvalidArgumentError


@dataclass(frozen=True)
class KnotGrid:
    """
    Uniform knots of a linear spline space on [0, 1].

    Elements
    --------
    K_n : int
        Number of intervals of [0, 1].
    knots : np.ndarray
        Knots k / K_n for k = -1, ..., K_n + 1, i.e. one extension knot on each side.
    """
    K_n: int
    knots: np.ndarray

    @property
    def spacing(self) -> float:
        return 1.0 / self.K_n

    @property
    def interior_knots(self) -> np.ndarray:
        """
        Knots 0 = k_0 < ... < k_{K_n} = 1. The basis function B_k peaks at interior_knots[k - 1].
        """
        return self.knots[1:-1]

    @property
    def num_basis(self) -> int:
        return self.K_n + 1


def _check_number_of_intervals(K_n: int) -> int:
    if isinstance(K_n, bool) or not isinstance(K_n, numbers.Integral):
        raise InvalidArgumentError(f"K_n must be an integer, got {K_n!r}.")
    if K_n < 2:
        raise InvalidArgumentError(f"K_n must be at least 2, got {K_n}.")

    return int(K_n)


def build_knots(K_n: int) -> KnotGrid:
    """
    Build equally spaced knots on [0, 1] with one extension knot on each side.

    Parameters
    ----------
    K_n : int
        Number of intervals, at least 2.

    Returns
    -------
    grid : KnotGrid
        Knot grid.
    """
    K_n = _check_number_of_intervals(K_n)
    knots = np.arange(-1, K_n + 2, dtype=float) / K_n
    knots.setflags(write=False)

    return KnotGrid(K_n=K_n, knots=knots)


def _check_unit_interval(x: np.ndarray) -> None:
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise InvalidArgumentError(f"Evaluation points must lie in [0, 1], got values in [{np.min(x)}, {np.max(x)}].")


def eval_basis(
        grid: KnotGrid,
        k: int,
        x: Union[float, np.ndarray]
) -> Union[float, np.ndarray]:
    """
    Evaluate the hat function B_k, which peaks at the knot (k - 1) / K_n and has support
    [(k - 2) / K_n, k / K_n] intersected with [0, 1].

    Parameters
    ----------
    grid : KnotGrid
        Knot grid.
    k : int
        Basis index in 1, ..., K_n + 1.
    x : Union[float, np.ndarray]
        Points of [0, 1].

    Returns
    -------
    value : Union[float, np.ndarray]
        Basis values, same shape as x.
    """
    if not 1 <= k <= grid.num_basis:
        raise InvalidArgumentError(f"Basis index must be in 1..{grid.num_basis}, got {k}.")

    points = np.asarray(x, dtype=float)
    _check_unit_interval(points)
    value = np.maximum(0.0, 1.0 - np.abs(grid.K_n * points - (k - 1)))

    return float(value) if value.ndim == 0 else value


def basis_matrix(
        grid: KnotGrid,
        x: np.ndarray
) -> sparse.csr_matrix:
    """
    Evaluate every basis function at every point. Each row holds at most two nonzeros summing to one.

    Parameters
    ----------
    grid : KnotGrid
        Knot grid.
    x : np.ndarray
        (n,) points of [0, 1].

    Returns
    -------
    matrix : sparse.csr_matrix
        (n, K_n + 1) matrix [B_k(x_i)].
    """
    points = np.asarray(x, dtype=float).ravel()
    _check_unit_interval(points)

    scaled = grid.K_n * points
    left = np.minimum(np.floor(scaled).astype(int), grid.K_n - 1)
    weight = scaled - left

    rows = np.repeat(np.arange(points.size), 2)
    cols = np.column_stack((left, left + 1)).ravel()
    values = np.column_stack((1.0 - weight, weight)).ravel()

    matrix = sparse.csr_matrix((values, (rows, cols)), shape=(points.size, grid.num_basis))
    matrix.eliminate_zeros()

    return matrix


def evaluate_spline(
        grid: KnotGrid,
        coefficients: np.ndarray,
        x: Union[float, np.ndarray]
) -> Union[float, np.ndarray]:
    """
    Evaluate sum_k b_k B_k(x), i.e. the piecewise linear interpolant of the coefficients at the knots.
    """
    points = np.asarray(x, dtype=float)
    _check_unit_interval(points)
    value = np.interp(points, grid.interior_knots, coefficients)

    return float(value) if value.ndim == 0 else value
