"""
    @file:              verifiers.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the numerical verifiers of the hypothesis family: convexity, Holder
                        regularity, pairwise separation, Kullback-Leibler divergences and the closed-form value of the
                        integrated squared perturbation.
"""

import itertools
import logging
import math
from typing import Dict, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.integrate import fixed_quad

from convexpspline.hypotheses.family import (
    FamilyParams,
    HypothesisFamily,
    family_for_sample_size,
    theorem_scale
)
from convexpspline.hypotheses.piecewise import PiecewisePolyFn
from convexpspline.utils.exceptions import InvalidArgumentError
from convexpspline.utils.tools import check_authorization_of_file_creation

_logger = logging.getLogger(__name__)


class DefaultParams:
    HOLDER_GRID_SIZE = 2048
    HOLDER_RELATIVE_TOLERANCE = 1e-9
    SEPARATION_RELATIVE_TOLERANCE = 1e-10
    INTEGRAL_RELATIVE_TOLERANCE = 1e-8
    PAIR_CHUNK_SIZE = 256


class HolderReport(NamedTuple):
    max_ratio: float
    bound: float
    x: float
    y: float
    passed: bool


def separation(family: HypothesisFamily, j: int, k: int) -> float:
    """
    Exact ||f_j - f_k||_inf.

    Parameters
    ----------
    family : HypothesisFamily
        Hypothesis family.
    j, k : int
        Member indices.

    Returns
    -------
    distance : float
        Sup-norm distance, obtained piece by piece from the vertices of the quadratic difference.
    """
    if j == k:
        return 0.0

    return (family[j] - family[k]).sup_norm().value


def separation_location(family: HypothesisFamily, j: int, k: int) -> float:
    """
    Point where |f_j - f_k| reaches its maximum inside the block perturbed in the member of larger index. The maximum
    is reached at the same height in the block of the smaller index too, so the search is restricted to one block.
    """
    if j == k:
        raise InvalidArgumentError(f"The separation location needs two distinct members, got j = k = {j}.")

    params = family.params
    origin = (max(j, k) - 1) * params.block_width

    return (family[j] - family[k]).sup_norm(origin, min(1.0, origin + params.block_width)).location


def kl_divergence(
        family: HypothesisFamily,
        j: int,
        n: int,
        sigma: Optional[float] = None
) -> float:
    """
    Kullback-Leibler divergence between the Gaussian regression models of f_j and f_0 on the design x_i = i / n.

    Parameters
    ----------
    family : HypothesisFamily
        Hypothesis family.
    j : int
        Member index, at least 1.
    n : int
        Sample size.
    sigma : Optional[float]
        Noise level. p* = 1 / (2 sigma^2); defaults to the p* of the family.

    Returns
    -------
    divergence : float
        p* sum_i (f_j(i / n) - f_0(i / n))^2.
    """
    if j < 1:
        raise InvalidArgumentError(f"j must be at least 1, got {j}.")
    if sigma is not None and sigma <= 0.0:
        raise InvalidArgumentError(f"sigma must be positive, got {sigma}.")

    p_star = family.params.p_star if sigma is None else 1.0 / (2.0 * sigma ** 2)
    difference = family[j] - family[0]
    points = np.arange(1, n + 1, dtype=float) / n

    return float(p_star * np.sum(difference(points) ** 2))


def mean_kl_divergence(family: HypothesisFamily, n: int, sigma: Optional[float] = None) -> float:
    return float(np.mean([kl_divergence(family, j, n, sigma) for j in range(1, family.M_n + 1)]))


def closed_form_integral(params: FamilyParams) -> float:
    """
    Integral of (f_1 - f_0)^2 over [0, 1], equal to 2 L_bar^2 K_n^-(2 gamma + 3) (1/20 + 43/60).
    """
    return 2.0 * params.L_bar ** 2 * params.K_n ** (-(2.0 * params.gamma + 3.0)) * (1.0 / 20.0 + 43.0 / 60.0)


def quadrature_integral(family: HypothesisFamily, j: int = 1) -> float:
    """
    Integral of (f_j - f_0)^2 over [0, 1] by Gauss-Legendre quadrature on each piece, exact for the quartic pieces.
    """
    difference = family[j] - family[0]

    return float(sum(fixed_quad(lambda x: difference(x) ** 2, piece.start, piece.end, n=5)[0] for piece in difference))


def verify_holder(
        fn: PiecewisePolyFn,
        r: float,
        L: float,
        grid_size: int = DefaultParams.HOLDER_GRID_SIZE
) -> HolderReport:
    """
    Largest Holder ratio |f'(x) - f'(y)| / |x - y|^(r - 1) over all pairs of a uniform grid completed with the
    breakpoints of f.

    Parameters
    ----------
    fn : PiecewisePolyFn
        Function with a piecewise linear derivative.
    r : float
        Holder order in (1, 2].
    L : float
        Holder constant.
    grid_size : int
        Number of uniform grid points.

    Returns
    -------
    report : HolderReport
        Maximal ratio, its pair and whether it stays below L (1 + 1e-9).
    """
    gamma = r - 1.0
    derivative = fn.derivative()
    start, end = fn.domain
    points = np.union1d(np.linspace(start, end, grid_size), fn.breakpoints)
    values = derivative(points)

    best = HolderReport(0.0, L, float(points[0]), float(points[0]), True)
    chunk = DefaultParams.PAIR_CHUNK_SIZE
    for first in range(0, points.size, chunk):
        x, dx = points[first:first + chunk, None], values[first:first + chunk, None]
        distance = np.abs(x - points[None, :])
        valid = distance > 1e-15
        ratio = np.zeros_like(distance)
        ratio[valid] = np.abs(dx - values[None, :])[valid] / distance[valid] ** gamma
        row, col = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
        if ratio[row, col] > best.max_ratio:
            best = HolderReport(float(ratio[row, col]), L, float(points[first + row]), float(points[col]), True)

    return best._replace(passed=best.max_ratio <= L * (1.0 + DefaultParams.HOLDER_RELATIVE_TOLERANCE))


def convexity_check(fn: PiecewisePolyFn, tol: float = 1e-12) -> bool:
    """
    Whether f' is nondecreasing, i.e. nondecreasing on each piece and without downward jump at the breakpoints.
    """
    scale = 1.0 + float(np.max(np.abs(fn.coefficients)))
    derivative = fn.derivative()
    if np.any(derivative.coefficients[:, 1] < -tol * scale):
        return False
    if len(fn) == 1:
        return True

    left_limits = derivative.end_values()[:-1]
    right_values = derivative.coefficients[1:, 2]

    return bool(np.all(right_values >= left_limits - tol * scale))


def kl_bound(params: FamilyParams, n: int) -> float:
    """
    Upper bound p* (n I + 2 s^2) of each divergence, with I the closed-form integral and s = L_bar K_n^-r. The
    Riemann sum of (f_j - f_0)^2 exceeds n I by at most twice its maximum since the squared perturbation goes up and
    down twice.
    """
    return params.p_star * (n * closed_form_integral(params) + 2.0 * params.separation ** 2)


def c3_threshold(
        r: float,
        L: float,
        c0: float,
        sigma: float = 1.0,
        n_start: int = 16,
        n_max: int = 2 ** 60
) -> Optional[Dict]:
    """
    Smallest n of the doubling grid n_start, 2 n_start, ... for which the family at scale theorem_scale(n, r) exists
    and the divergence bound meets c0 log M_n. Report only.

    Returns
    -------
    threshold : Optional[Dict]
        n, K_n, M_n, the bound and c0 log M_n at the threshold, None if n_max is reached.
    """
    n = n_start
    while n <= n_max:
        try:
            params = FamilyParams.from_sigma(r=r, L=L, c0=c0, K_n=theorem_scale(n, r), sigma=sigma)
        except InvalidArgumentError:
            n *= 2
            continue

        if params.M_n >= 2 and kl_bound(params, n) <= c0 * math.log(params.M_n):
            return dict(
                n=n,
                K_n=params.K_n,
                M_n=params.M_n,
                kl_bound=kl_bound(params, n),
                c0_log_M_n=c0 * math.log(params.M_n)
            )
        n *= 2

    return None


def verify_family(
        r: float,
        L: float,
        c0: float,
        n: int,
        sigma: float = 1.0,
        p_star: Optional[float] = None,
        holder_grid_size: int = DefaultParams.HOLDER_GRID_SIZE
) -> Dict:
    """
    Check convexity and Holder regularity of every member, the pairwise separations, the mean divergence against
    c0 log M_n and the closed-form integral, for the family at scale theorem_scale(n, r).

    Parameters
    ----------
    r : float
        Holder order in (1, 2].
    L : float
        Holder constant.
    c0 : float
        Constant in (0, 1/8).
    n : int
        Sample size.
    sigma : float
        Noise level.
    p_star : Optional[float]
        Divergence coefficient, 1 / (2 sigma^2) by default.
    holder_grid_size : int
        Uniform grid size of the Holder check.

    Returns
    -------
    report : Dict
        Parameters and one section per condition, each with a 'passed' flag.
    """
    family = family_for_sample_size(n, r, L, c0, sigma=sigma, p_star=p_star)
    params = family.params

    holder_reports = [verify_holder(f, r, L, holder_grid_size) for f in family]
    convex = [convexity_check(f) for f in family]
    regularity = dict(
        all_convex=all(convex),
        max_holder_ratio=max(report.max_ratio for report in holder_reports),
        holder_bound=L,
        passed=all(convex) and all(report.passed for report in holder_reports)
    )

    expected = params.separation
    distances = [separation(family, j, k) for j, k in itertools.combinations(range(len(family)), 2)]
    relative_errors = [abs(distance - expected) / expected for distance in distances]
    separated = dict(
        expected=expected,
        min_separation=min(distances),
        max_separation=max(distances),
        max_relative_error=max(relative_errors),
        passed=max(relative_errors) <= DefaultParams.SEPARATION_RELATIVE_TOLERANCE
    )

    mean_kl = mean_kl_divergence(family, n)
    divergence = dict(
        mean_kl=mean_kl,
        c0_log_M_n=c0 * math.log(params.M_n),
        passed=mean_kl <= c0 * math.log(params.M_n)
    )

    closed_form = closed_form_integral(params)
    quadrature = quadrature_integral(family)
    integral = dict(
        closed_form=closed_form,
        quadrature=quadrature,
        relative_error=abs(quadrature - closed_form) / closed_form,
        passed=abs(quadrature - closed_form) <= DefaultParams.INTEGRAL_RELATIVE_TOLERANCE * closed_form
    )

    report = dict(
        parameters=dict(params.to_dict(), n=n, sigma=sigma, holder_grid_size=holder_grid_size),
        convexity_and_holder=regularity,
        separation=separated,
        kullback_leibler=divergence,
        integral=integral,
        passed=regularity["passed"] and separated["passed"] and divergence["passed"] and integral["passed"]
    )
    _logger.info(f"Family verification for r = {r}, n = {n}: {'passed' if report['passed'] else 'failed'}.")

    return report


def export_family_csv(
        family: HypothesisFamily,
        path: str,
        overwrite: bool = True
) -> pd.DataFrame:
    """
    Write the pieces of every member as rows (j, breakpoint, quad_coef_a, lin_coef_b, const_c), the coefficients
    being those of a t^2 + b t + c with t = x - breakpoint.

    Returns
    -------
    table : pd.DataFrame
        Written table.
    """
    rows = [
        dict(j=j, breakpoint=piece.start, quad_coef_a=piece.a, lin_coef_b=piece.b, const_c=piece.c)
        for j, member in enumerate(family)
        for piece in member
    ]
    table = pd.DataFrame(rows, columns=["j", "breakpoint", "quad_coef_a", "lin_coef_b", "const_c"])

    if not path.endswith(".csv"):
        path = f"{path}.csv"
    check_authorization_of_file_creation(path, overwrite)
    table.to_csv(path, index=False, float_format="%.17g")

    return table
