"""
    @file:              data_generation.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the generation of samples y_i = f(i / n) + sigma z_i from independent
                        counter-based random streams keyed by (base seed, n, replicate).
"""

from typing import Callable, Tuple

import numpy as np

from convexpspline.utils.exceptions import InvalidArgumentError


def noise_stream(base_seed: int, n: int, replicate: int) -> np.random.Generator:
    """
    Philox generator of the replicate. Streams of different keys are independent and do not depend on the order in
    which they are created.
    """
    if base_seed < 0:
        raise InvalidArgumentError(f"The base seed must be nonnegative, got {base_seed}.")

    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(base_seed), int(n), int(replicate)])))


def design_points(n: int) -> np.ndarray:
    return np.arange(1, n + 1, dtype=float) / n


def generate_data(
        truth: Callable[[np.ndarray], np.ndarray],
        n: int,
        sigma: float,
        base_seed: int,
        replicate: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw a sample of the regression model on the design x_i = i / n.

    Parameters
    ----------
    truth : Callable[[np.ndarray], np.ndarray]
        Regression function.
    n : int
        Sample size, at least 2.
    sigma : float
        Noise level, nonnegative.
    base_seed : int
        Seed of the study.
    replicate : int
        Replicate index.

    Returns
    -------
    x, y : Tuple[np.ndarray, np.ndarray]
        Design points and responses.
    """
    if n < 2:
        raise InvalidArgumentError(f"n must be at least 2, got {n}.")
    if sigma < 0.0:
        raise InvalidArgumentError(f"sigma must be nonnegative, got {sigma}.")

    x = design_points(n)
    signal = np.asarray(truth(x), dtype=float)
    if sigma == 0.0:
        return x, signal

    return x, signal + sigma * noise_stream(base_seed, n, replicate).standard_normal(n)
