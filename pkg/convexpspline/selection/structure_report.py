"""
    @file:              structure_report.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the StructureReport class, which gathers the reduced Gram matrix G, the
                        reduced penalty matrix H, their diagonal-dominance margins and the infinity norm of the
                        selection function of an index set.
"""

from dataclasses import dataclass
import logging

import numpy as np

from convexpspline.design.design_system import DesignSystem
from convexpspline.selection.selection_structure import SelectionStructure
from convexpspline.utils.banded import banded_bandwidth, solve_spd_dense
from convexpspline.utils.exceptions import InvalidArgumentError

_logger = logging.getLogger(__name__)


class HBounds:
    DIAGONAL = 6.0
    FIRST_OFF_DIAGONAL = 4.0
    SECOND_OFF_DIAGONAL = 1.0


def dominance_margins(matrix: np.ndarray) -> np.ndarray:
    """
    Row margins a_ii - sum_{j != i} |a_ij|.
    """
    absolute = np.abs(matrix)

    return np.diag(matrix) - (absolute.sum(axis=1) - np.diag(absolute))


def infinity_norm(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix).sum(axis=1)))


@dataclass(frozen=True)
class StructureReport:
    """
    Structural quantities of a selection matrix on a design.

    Elements
    --------
    G : np.ndarray
        F_alpha Gamma F_alpha^T.
    H : np.ndarray
        (F_alpha D2^T)(F_alpha D2^T)^T.
    xi : np.ndarray
        Dominance margins of G.
    xi_tilde : np.ndarray
        Dominance margins of G + lambda H = F_alpha Lambda F_alpha^T.
    lipschitz_norm : float
        ||F_alpha^T (F_alpha Lambda F_alpha^T)^{-1} F_alpha||_inf.
    lam : float
        Normalized penalty.
    e_inverse_norm : float
        ||E^{-1}||_inf with E = diag(1 / xi_tilde) F_alpha Lambda F_alpha^T, NaN when some xi_tilde <= 0.
    xi_f_norm : float
        ||diag(1 / xi_tilde) F_alpha||_inf, NaN when some xi_tilde <= 0.
    """
    G: np.ndarray
    H: np.ndarray
    xi: np.ndarray
    xi_tilde: np.ndarray
    lipschitz_norm: float
    lam: float
    e_inverse_norm: float
    xi_f_norm: float

    @property
    def min_xi(self) -> float:
        return float(np.min(self.xi))

    @property
    def min_xi_tilde(self) -> float:
        return float(np.min(self.xi_tilde))

    @property
    def dominance_ok(self) -> bool:
        """
        Whether G + lambda H is strictly diagonally dominant.
        """
        return bool(np.all(self.xi_tilde > 0.0))

    @property
    def g_dominance_ok(self) -> bool:
        return bool(np.all(self.xi > 0.0))

    @property
    def g_tridiagonal(self) -> bool:
        atol = 1e-12 * (1.0 + float(np.max(np.abs(self.G))))

        return banded_bandwidth(self.G, atol=atol) <= 1 and bool(np.allclose(self.G, self.G.T, rtol=0.0, atol=atol))

    @property
    def h_bandwidth_ok(self) -> bool:
        return banded_bandwidth(self.H, atol=1e-12) <= 2

    @property
    def h_bounds_ok(self) -> bool:
        tol = 1e-12
        diagonal = np.diag(self.H)
        first = np.diagonal(self.H, offset=1)
        second = np.diagonal(self.H, offset=2)

        return bool(
            np.all(diagonal >= -tol)
            and np.all(diagonal <= HBounds.DIAGONAL + tol)
            and np.all(np.abs(first) <= HBounds.FIRST_OFF_DIAGONAL + tol)
            and np.all(np.abs(second) <= HBounds.SECOND_OFF_DIAGONAL + tol)
        )

    @property
    def E(self) -> np.ndarray:
        """
        diag(1 / xi_tilde) (G + lambda H), which has unit dominance margins.
        """
        return (self.G + self.lam * self.H) / self.xi_tilde[:, None]


def selection_function_matrix(selection: SelectionStructure, system: DesignSystem) -> np.ndarray:
    """
    Matrix F_alpha^T (F_alpha Lambda F_alpha^T)^{-1} F_alpha of the linear selection function ybar -> b.
    """
    F = selection.F_alpha

    return F.T @ solve_spd_dense(F @ system.Lambda @ F.T, F, bandwidth=2)


def structure_report(
        selection: SelectionStructure,
        system: DesignSystem
) -> StructureReport:
    """
    Compute G, H, the dominance margins and the norm of the selection function.

    Parameters
    ----------
    selection : SelectionStructure
        Selection structure.
    system : DesignSystem
        Design system with the same K_n.

    Returns
    -------
    report : StructureReport
        Structure report. A nonpositive margin of G + lambda H is reported through `dominance_ok`, not raised.
    """
    if selection.K_n != system.K_n:
        raise InvalidArgumentError(f"Selection built for K_n = {selection.K_n} used on a design with K_n = {system.K_n}.")

    F = selection.F_alpha
    G = F @ system.Gamma @ F.T
    FD = F @ system.D2.T
    H = FD @ FD.T
    reduced = G + system.lam * H

    xi = dominance_margins(G)
    xi_tilde = dominance_margins(reduced)

    if np.all(xi_tilde > 0.0):
        E = reduced / xi_tilde[:, None]
        e_inverse_norm = infinity_norm(np.linalg.inv(E))
        xi_f_norm = infinity_norm(F / xi_tilde[:, None])
    else:
        _logger.info(
            f"Index set {selection.alpha} is not diagonally dominant at lambda = {system.lam:.4g} "
            f"(min margin {np.min(xi_tilde):.4g})."
        )
        e_inverse_norm = float("nan")
        xi_f_norm = float("nan")

    return StructureReport(
        G=G,
        H=H,
        xi=xi,
        xi_tilde=xi_tilde,
        lipschitz_norm=infinity_norm(selection_function_matrix(selection, system)),
        lam=system.lam,
        e_inverse_norm=e_inverse_norm,
        xi_f_norm=xi_f_norm
    )
