"""
    @file:              family.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the construction of the finite family of convex Holder functions used to
                        bound the minimax sup-norm risk from below. Every member is the exact antiderivative of a
                        nondecreasing piecewise linear function g_j made of ramps and plateaus.
"""

from dataclasses import dataclass
import logging
import math
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from convexpspline.hypotheses.piecewise import PiecewisePolyFn
from convexpspline.utils.exceptions import FamilyTooSmallError, InvalidArgumentError, SampleTooSmallError

_logger = logging.getLogger(__name__)

_FLOOR_EPSILON = 1e-9


@dataclass(frozen=True)
class FamilyParams:
    """
    Parameters of the hypothesis family.

    Elements
    --------
    r : float
        Holder order in (1, 2].
    L : float
        Holder constant.
    c0 : float
        Constant of the Kullback-Leibler condition, in (0, 1/8).
    p_star : float
        Kullback-Leibler coefficient, 1 / (2 sigma^2) for Gaussian noise.
    K_n : float
        Scale of the construction. Ramps have width 1 / K_n.
    """
    r: float
    L: float
    c0: float
    p_star: float
    K_n: float

    def __post_init__(self):
        if not 1.0 < self.r <= 2.0:
            raise InvalidArgumentError(f"r must be in (1, 2], got {self.r}.")
        if self.L <= 0.0:
            raise InvalidArgumentError(f"L must be positive, got {self.L}.")
        if not 0.0 < self.c0 < 0.125:
            raise InvalidArgumentError(f"c0 must be in (0, 1/8), got {self.c0}.")
        if self.p_star <= 0.0:
            raise InvalidArgumentError(f"p_star must be positive, got {self.p_star}.")
        if self.K_n <= 0.0:
            raise InvalidArgumentError(f"K_n must be positive, got {self.K_n}.")
        if self.gamma < 1.0 and self.K_n ** (1.0 - self.gamma) < 4.0:
            raise InvalidArgumentError(
                f"Blocks of width K_n^-gamma must hold the four ramp units of width 1 / K_n, which needs "
                f"K_n^(1 - gamma) >= 4; got K_n = {self.K_n} and gamma = {self.gamma}."
            )

    @classmethod
    def from_sigma(cls, r: float, L: float, c0: float, K_n: float, sigma: float = 1.0) -> "FamilyParams":
        if sigma <= 0.0:
            raise InvalidArgumentError(f"sigma must be positive, got {sigma}.")

        return cls(r=r, L=L, c0=c0, p_star=1.0 / (2.0 * sigma ** 2), K_n=K_n)

    @property
    def gamma(self) -> float:
        return self.r - 1.0

    @property
    def is_lipschitz_case(self) -> bool:
        """
        Whether gamma = 1, where blocks have the fixed width 4 / K_n.
        """
        return self.gamma >= 1.0

    @property
    def L_bar(self) -> float:
        if self.is_lipschitz_case:
            return min(self.L, math.sqrt(self.c0 / (12.0 * self.p_star)))

        return min(self.L / 4.0, math.sqrt(self.c0 * self.gamma / (12.0 * self.p_star)))

    @property
    def ramp_width(self) -> float:
        return 1.0 / self.K_n

    @property
    def slope(self) -> float:
        """
        Slope of the ramps of g_j.
        """
        if self.is_lipschitz_case:
            return self.L_bar

        return self.L_bar * self.K_n ** (1.0 - self.gamma)

    @property
    def step(self) -> float:
        """
        Rise of g_j along one ramp width.
        """
        return self.slope * self.ramp_width

    @property
    def block_width(self) -> float:
        if self.is_lipschitz_case:
            return 4.0 / self.K_n

        return self.K_n ** (-self.gamma)

    @property
    def M_n(self) -> int:
        """
        Number of perturbed members, i.e. of complete blocks inside [0, 1].
        """
        return int(math.floor(1.0 / self.block_width + _FLOOR_EPSILON))

    @property
    def separation(self) -> float:
        """
        ||f_j - f_k||_inf = L_bar K_n^-r for j != k.
        """
        return self.L_bar * self.K_n ** (-self.r)

    @property
    def s_n(self) -> float:
        return self.separation / 2.0

    def to_dict(self) -> dict:
        return dict(
            r=self.r,
            gamma=self.gamma,
            L=self.L,
            L_bar=self.L_bar,
            c0=self.c0,
            p_star=self.p_star,
            K_n=self.K_n,
            M_n=self.M_n,
            s_n=self.s_n,
            slope=self.slope,
            block_width=self.block_width
        )


def theorem_scale(n: int, r: float) -> float:
    """
    Scale K_n of the family for a sample size n, chosen so that the separation is of order (log n / n)^(r / (2r + 1)).
    When gamma = 1 the blocks are four ramp widths wide, so the scale is multiplied by 4 to keep
    M_n = floor((n / log n)^(1/5)) members.

    Parameters
    ----------
    n : int
        Sample size, at least 3.
    r : float
        Holder order in (1, 2].

    Returns
    -------
    K_n : float
        Scale of the construction.
    """
    if n < 3:
        raise SampleTooSmallError(f"n must be at least 3, got {n}.")

    base = (n / math.log(n)) ** (1.0 / (2.0 * r + 1.0))

    return 4.0 * base if r - 1.0 >= 1.0 else base


def _block_pieces(params: FamilyParams, block: int, perturbed: bool) -> Tuple[List[float], List[Tuple[float, float]]]:
    """
    Cut points and (slope, value at start) of the pieces of g on a block. The unperturbed block ramps over the first
    and the fourth ramp widths; the perturbed one stays flat, then ramps over the second and third ramp widths.
    """
    d, u, slope = params.ramp_width, params.step, params.slope
    origin = block * params.block_width
    following = (block + 1) * params.block_width
    level = 2.0 * block * u

    if perturbed:
        cuts = [origin, origin + d, origin + 3.0 * d, following]
        pieces = [(0.0, level), (slope, level), (0.0, level + 2.0 * u)]
    else:
        cuts = [origin, origin + d, origin + 3.0 * d, origin + 4.0 * d, following]
        pieces = [(slope, level), (0.0, level + u), (slope, level + u), (0.0, level + 2.0 * u)]
        if following - cuts[3] <= 1e-12 * params.block_width:
            cuts, pieces = cuts[:3] + [following], pieces[:3]

    return cuts, pieces


def build_derivative(params: FamilyParams, j: int) -> PiecewisePolyFn:
    """
    Nondecreasing piecewise linear g_j on [0, 1]; g_0 is the unperturbed function and g_j differs from it only on the
    block [(j - 1) w, j w) of width w.
    """
    cuts: List[float] = []
    pieces: List[Tuple[float, float]] = []
    block = 0
    while block * params.block_width < 1.0:
        block_cuts, block_pieces = _block_pieces(params, block, perturbed=(block == j - 1))
        for start, end, piece in zip(block_cuts[:-1], block_cuts[1:], block_pieces):
            if start >= 1.0:
                break
            cuts.append(start)
            pieces.append(piece)
        block += 1

    breakpoints = np.asarray(cuts + [1.0])
    coefficients = [(0.0, slope, value) for slope, value in pieces]

    return PiecewisePolyFn(breakpoints, coefficients)


class HypothesisFamily(Sequence):
    """
    Functions f_0, ..., f_{M_n} with f_j(x) = integral of g_j from 0 to x.
    """

    def __init__(self, params: FamilyParams, derivatives: Sequence[PiecewisePolyFn]):
        self._params = params
        self._derivatives = tuple(derivatives)
        self._members = tuple(g.antiderivative(0.0) for g in self._derivatives)

    @property
    def params(self) -> FamilyParams:
        return self._params

    @property
    def derivatives(self) -> Tuple[PiecewisePolyFn, ...]:
        return self._derivatives

    @property
    def M_n(self) -> int:
        return len(self._members) - 1

    def __getitem__(self, j):
        return self._members[j]

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[PiecewisePolyFn]:
        return iter(self._members)


def build_family(params: FamilyParams) -> HypothesisFamily:
    """
    Build the family f_0, ..., f_{M_n}.

    Parameters
    ----------
    params : FamilyParams
        Family parameters.

    Returns
    -------
    family : HypothesisFamily
        M_n + 1 convex piecewise quadratic functions with f_j(0) = 0.
    """
    M_n = params.M_n
    if M_n < 2:
        raise FamilyTooSmallError(
            f"The family needs M_n >= 2 perturbed members, got M_n = {M_n} for K_n = {params.K_n} and r = {params.r}."
        )

    _logger.info(f"Building hypothesis family with K_n = {params.K_n:.6g}, M_n = {M_n}, L_bar = {params.L_bar:.6g}.")

    return HypothesisFamily(params, [build_derivative(params, j) for j in range(M_n + 1)])


def family_for_sample_size(
        n: int,
        r: float,
        L: float,
        c0: float,
        sigma: float = 1.0,
        p_star: Optional[float] = None
) -> HypothesisFamily:
    """
    Family at the scale theorem_scale(n, r).
    """
    K_n = theorem_scale(n, r)
    if p_star is None:
        params = FamilyParams.from_sigma(r=r, L=L, c0=c0, K_n=K_n, sigma=sigma)
    else:
        params = FamilyParams(r=r, L=L, c0=c0, p_star=p_star, K_n=K_n)

    return build_family(params)
