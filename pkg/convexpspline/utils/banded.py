"""
    @file:              banded.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains helpers to move symmetric banded matrices between their dense form and the
                        LAPACK lower banded storage used by scipy.linalg.cholesky_banded and scipy.linalg.solveh_banded.
"""

import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded

from .exceptions import NumericalBreakdownError


def dense_to_lower_banded(matrix: np.ndarray, bandwidth: int) -> np.ndarray:
    """
    Convert a symmetric dense matrix to lower banded storage, i.e. ab[d, j] = matrix[j + d, j].

    Parameters
    ----------
    matrix : np.ndarray
        Symmetric (N, N) matrix.
    bandwidth : int
        Number of sub-diagonals to keep.

    Returns
    -------
    ab : np.ndarray
        (bandwidth + 1, N) array.
    """
    size = matrix.shape[0]
    ab = np.zeros((bandwidth + 1, size))
    for d in range(min(bandwidth, size - 1) + 1):
        ab[d, :size - d] = np.diagonal(matrix, offset=-d)

    return ab


def lower_banded_to_dense(ab: np.ndarray) -> np.ndarray:
    """
    Rebuild the symmetric dense matrix from lower banded storage.

    Parameters
    ----------
    ab : np.ndarray
        (bandwidth + 1, N) array in lower banded storage.

    Returns
    -------
    matrix : np.ndarray
        Symmetric (N, N) matrix.
    """
    size = ab.shape[1]
    matrix = np.diag(ab[0])
    for d in range(1, min(ab.shape[0], size)):
        off_diagonal = np.diag(ab[d, :size - d], k=-d)
        matrix = matrix + off_diagonal + off_diagonal.T

    return matrix


def banded_bandwidth(matrix: np.ndarray, atol: float = 0.0) -> int:
    """
    Largest |i - j| such that |matrix[i, j]| > atol.
    """
    rows, cols = np.nonzero(np.abs(matrix) > atol)
    if rows.size == 0:
        return 0

    return int(np.max(np.abs(rows - cols)))


def cholesky_lower_banded(ab: np.ndarray) -> np.ndarray:
    """
    Banded Cholesky factorization of a symmetric positive definite matrix.

    Parameters
    ----------
    ab : np.ndarray
        Lower banded storage of the matrix.

    Returns
    -------
    factor : np.ndarray
        Lower banded Cholesky factor, ready for `solve_with_cholesky`.

    Raises
    ------
    NumericalBreakdownError
        If the matrix is not positive definite.
    """
    try:
        return cholesky_banded(ab, lower=True, check_finite=False)
    except LinAlgError as error:
        raise NumericalBreakdownError(f"Banded Cholesky factorization failed: {error}.") from error


def solve_with_cholesky(factor: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Solve A x = rhs given the lower banded Cholesky factor of A.
    """
    return cho_solve_banded((factor, True), rhs, check_finite=False)


def solve_spd_dense(matrix: np.ndarray, rhs: np.ndarray, bandwidth: int) -> np.ndarray:
    """
    Solve a symmetric positive definite banded system given in dense form.

    Parameters
    ----------
    matrix : np.ndarray
        Symmetric positive definite (N, N) matrix whose entries vanish beyond `bandwidth`.
    rhs : np.ndarray
        Right-hand side, (N,) or (N, k).
    bandwidth : int
        Number of sub-diagonals.

    Returns
    -------
    solution : np.ndarray
        Solution with the shape of `rhs`.
    """
    if matrix.shape[0] == 0:
        return np.zeros_like(rhs, dtype=float)

    factor = cholesky_lower_banded(dense_to_lower_banded(matrix, bandwidth))

    return solve_with_cholesky(factor, rhs)
