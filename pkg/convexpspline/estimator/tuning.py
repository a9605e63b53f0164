"""
    @file:              tuning.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the tuning rule of the convex P-spline estimator, which picks the number
                        of knots from the sample size and the assumed Holder order and sets the penalty so that
                        lambda = 1 / K_n.
"""

from dataclasses import dataclass
import logging
import math
from typing import Tuple

from convexpspline.utils.exceptions import InvalidArgumentError, SampleTooSmallError

_logger = logging.getLogger(__name__)

MIN_SAMPLE_SIZE = 16


def check_holder_order(r: float) -> None:
    if not 1.0 < r <= 2.0:
        raise InvalidArgumentError(f"The Holder order r must be in (1, 2], got {r}.")


@dataclass(frozen=True)
class TuningRule:
    """
    Tuning parameters for a sample size.

    Elements
    --------
    n : int
        Sample size the rule was computed for.
    r : float
        Assumed Holder order.
    K_n : int
        Number of intervals, ceil((n / log n)^(1 / (2r + 1))).
    """
    n: int
    r: float
    K_n: int

    def lambda_star(self, beta_n: float) -> float:
        """
        lambda* = beta_n / K_n, which gives lambda = lambda* / beta_n = 1 / K_n.
        """
        return beta_n / self.K_n


def choose_tuning(n: int, r: float) -> TuningRule:
    """
    Number of knots and penalty rule of the estimator. The logarithm is natural.

    Parameters
    ----------
    n : int
        Sample size, at least 16.
    r : float
        Assumed Holder order in (1, 2].

    Returns
    -------
    rule : TuningRule
        K_n and the penalty rule, materialized once beta_n is known.
    """
    check_holder_order(r)
    if n < MIN_SAMPLE_SIZE:
        raise SampleTooSmallError(f"The tuning rule needs n >= {MIN_SAMPLE_SIZE}, got n = {n}.")

    K_n = int(math.ceil((n / math.log(n)) ** (1.0 / (2.0 * r + 1.0))))

    return TuningRule(n=int(n), r=float(r), K_n=max(K_n, 2))


def simulation_sample_size(n: int, r: float) -> Tuple[int, TuningRule]:
    """
    Smallest multiple of K_n that is at least n, K_n being chosen for the requested n.

    Parameters
    ----------
    n : int
        Requested sample size.
    r : float
        Assumed Holder order.

    Returns
    -------
    adjusted_n, rule : Tuple[int, TuningRule]
        Adjusted sample size and the rule of the requested one.
    """
    rule = choose_tuning(n, r)
    adjusted_n = int(math.ceil(n / rule.K_n)) * rule.K_n
    if adjusted_n != n:
        _logger.info(f"Sample size {n} adjusted to {adjusted_n} so that n / K_n is an integer (K_n = {rule.K_n}).")

    return adjusted_n, rule
