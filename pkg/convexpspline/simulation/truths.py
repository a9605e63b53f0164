"""
    @file:              truths.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the class TruthStrategies that enumerates the convex regression functions
                        available to the simulations.
"""

import enum
import math
from typing import Any, Callable, Dict, List, NamedTuple, Optional

import numpy as np

from convexpspline.hypotheses.family import FamilyParams, build_family, theorem_scale
from convexpspline.utils.exceptions import InvalidArgumentError

TruthCallable = Callable[[np.ndarray], np.ndarray]


def _quadratic(r: float, L: float, sigma: float, params: Dict[str, Any]) -> TruthCallable:
    return lambda x: np.asarray(x, dtype=float) ** 2


def _exponential(r: float, L: float, sigma: float, params: Dict[str, Any]) -> TruthCallable:
    return lambda x: np.exp(np.asarray(x, dtype=float))


def _power_1_5(r: float, L: float, sigma: float, params: Dict[str, Any]) -> TruthCallable:
    # f'(x) = L x^(1/2) is (1/2)-Holder with constant L.
    return lambda x: (L / 1.5) * np.asarray(x, dtype=float) ** 1.5


def _affine(r: float, L: float, sigma: float, params: Dict[str, Any]) -> TruthCallable:
    intercept = float(params.get("intercept", 1.0))
    slope = float(params.get("slope", 0.5))

    return lambda x: intercept + slope * np.asarray(x, dtype=float)


def _family_member(r: float, L: float, sigma: float, params: Dict[str, Any]) -> TruthCallable:
    scale_n = int(params.get("scale_n", 1_000_000))
    c0 = float(params.get("c0", 1.0 / 16.0))
    noise = sigma if sigma > 0.0 else 1.0
    family = build_family(FamilyParams.from_sigma(r=r, L=L, c0=c0, K_n=theorem_scale(scale_n, r), sigma=noise))

    j = int(params.get("j", 1))
    if not 0 <= j <= family.M_n:
        raise InvalidArgumentError(f"Family member j = {j} is outside 0..{family.M_n}.")

    return family[j]


class TruthStrategy(NamedTuple):
    name: str
    holder_order: Optional[float]
    factory: Callable


class TruthStrategies(enum.Enum):

    QUADRATIC = TruthStrategy(name="quadratic", holder_order=2.0, factory=_quadratic)
    EXPONENTIAL = TruthStrategy(name="exponential", holder_order=2.0, factory=_exponential)
    POWER_1_5 = TruthStrategy(name="power_1_5", holder_order=1.5, factory=_power_1_5)
    FAMILY_MEMBER = TruthStrategy(name="family_member", holder_order=None, factory=_family_member)
    AFFINE = TruthStrategy(name="affine", holder_order=2.0, factory=_affine)

    def __init__(self, *args):
        """
        Used to make sure that the truth strategies enumeration contains no strategy with the same name.
        """
        super().__init__()
        cls = self.__class__

        if any(self.value.name == member.value.name for member in cls):
            raise ValueError(f"Aliases not allowed in the TruthStrategies Enum Class, {self.value.name} is repeated.")

    @classmethod
    def get_available_names(cls) -> List[str]:
        """
        Available truth names.

        Returns
        -------
        available_names : List[str]
            Available names.
        """
        return [member.value.name for member in cls]

    @classmethod
    def from_name(cls, name: str) -> "TruthStrategies":
        for member in cls:
            if member.value.name == name:
                return member

        raise InvalidArgumentError(f"Unknown truth {name!r}. Available truths are {cls.get_available_names()}.")


def make_truth(
        name: str,
        r: float = 2.0,
        L: float = 1.0,
        sigma: float = 1.0,
        params: Optional[Dict[str, Any]] = None
) -> TruthCallable:
    """
    Build a named truth.

    Parameters
    ----------
    name : str
        One of TruthStrategies.get_available_names().
    r : float
        Holder order, used by the family member.
    L : float
        Holder constant, used by power_1_5 and the family member.
    sigma : float
        Noise level, sets p* of the family member.
    params : Optional[Dict[str, Any]]
        Extra parameters: 'j', 'scale_n' and 'c0' for the family member, 'intercept' and 'slope' for the affine truth.

    Returns
    -------
    truth : TruthCallable
        Vectorized function on [0, 1].
    """
    if L <= 0.0 or not math.isfinite(L):
        raise InvalidArgumentError(f"L must be a positive number, got {L}.")

    return TruthStrategies.from_name(name).value.factory(r, L, sigma, dict(params or {}))
