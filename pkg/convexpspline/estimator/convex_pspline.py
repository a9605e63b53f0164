"""
    @file:              convex_pspline.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the fitting interface of the convex linear P-spline estimator: the FitConfig
                        and FitResult classes, the fit, predict and noise-free fit functions and the export of fits.
"""

from dataclasses import dataclass
import logging
from typing import Callable, Dict, Optional, Union

import numpy as np
import pandas as pd

from convexpspline.design.design_system import DesignSystem, build_design
from convexpspline.design.knots import build_knots, evaluate_spline
from convexpspline.estimator.tuning import check_holder_order, choose_tuning
from convexpspline.hypotheses.piecewise import PiecewisePolyFn
from convexpspline.qp.problem import QPProblem, QPSolution, certify
from convexpspline.qp.solver_strategy import QPSolverStrategies
from convexpspline.utils.exceptions import InvalidArgumentError
from convexpspline.utils.tools import check_authorization_of_file_creation, save_json

_logger = logging.getLogger(__name__)

TruthFunction = Union[PiecewisePolyFn, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class FitConfig:
    """
    Configuration of a fit.

    Elements
    --------
    r : float
        Assumed Holder order in (1, 2].
    K_n : Optional[int]
        Number of intervals. Defaults to the tuning rule.
    lambda_star : Optional[float]
        Unnormalized penalty. Defaults to beta_n / K_n.
    sigma_known : Optional[float]
        Noise level, when known. Recorded only.
    solver : str
        Name of the quadratic program solver.
    """
    r: float = 2.0
    K_n: Optional[int] = None
    lambda_star: Optional[float] = None
    sigma_known: Optional[float] = None
    solver: str = "active_set"

    def __post_init__(self):
        check_holder_order(self.r)
        if self.K_n is not None and self.K_n < 2:
            raise InvalidArgumentError(f"K_n must be at least 2, got {self.K_n}.")
        if self.lambda_star is not None and self.lambda_star < 0.0:
            raise InvalidArgumentError(f"lambda_star must be nonnegative, got {self.lambda_star}.")
        if self.sigma_known is not None and self.sigma_known <= 0.0:
            raise InvalidArgumentError(f"sigma_known must be positive, got {self.sigma_known}.")
        QPSolverStrategies.from_name(self.solver)

    def to_dict(self) -> Dict:
        return dict(r=self.r, K_n=self.K_n, lambda_star=self.lambda_star, sigma_known=self.sigma_known,
                    solver=self.solver)


@dataclass(frozen=True)
class FitResult:
    """
    Result of a convex P-spline fit.

    Elements
    --------
    coefficients : np.ndarray
        (K_n + 1,) coefficients b_hat, the values of the fit at the knots.
    system : DesignSystem
        Design system of the fit.
    solution : QPSolution
        Solution of the quadratic program.
    fitted_fn : PiecewisePolyFn
        Fitted piecewise linear function.
    config : FitConfig
        Configuration, with the overrides as given.
    ybar : np.ndarray
        Weighted response X^T y / beta_n of the fit.
    """
    coefficients: np.ndarray
    system: DesignSystem
    solution: QPSolution
    fitted_fn: PiecewisePolyFn
    config: FitConfig
    ybar: np.ndarray

    @property
    def knots(self) -> np.ndarray:
        return self.system.grid.interior_knots

    @property
    def diagnostics(self) -> Dict:
        return dict(
            kkt_residuals=self.solution.residuals._asdict(),
            certified=certify(QPProblem(self.system, self.ybar), self.solution),
            active_set_size=len(self.solution.active_set),
            iterations=self.solution.iterations,
            lam=self.system.lam,
            lambda_star=self.system.lambda_star,
            K_n=self.system.K_n,
            n=self.system.n,
            beta_n=self.system.beta_n,
            simulation_mode=self.system.simulation_mode
        )

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return predict(self, x)

    def to_dict(self) -> Dict:
        return dict(
            config=self.config.to_dict(),
            K_n=self.system.K_n,
            n=self.system.n,
            lambda_star=self.system.lambda_star,
            knots=self.knots,
            coefficients=self.coefficients,
            active_set=list(self.solution.active_set),
            diagnostics=self.diagnostics
        )

    def save_json(self, path: str, overwrite: bool = True, extra: Optional[Dict] = None) -> None:
        payload = self.to_dict()
        if extra:
            payload.update(extra)
        save_json(payload, path, overwrite)

    def save_csv(self, path: str, overwrite: bool = True) -> None:
        """
        Write the (knot, coefficient) pairs.
        """
        if not path.endswith(".csv"):
            path = f"{path}.csv"
        check_authorization_of_file_creation(path, overwrite)
        pd.DataFrame(dict(knot=self.knots, coefficient=self.coefficients)).to_csv(
            path, index=False, float_format="%.17g"
        )


def fit_design(
        system: DesignSystem,
        y: np.ndarray,
        config: Optional[FitConfig] = None
) -> FitResult:
    """
    Fit the convex P-spline on a prebuilt design.

    Parameters
    ----------
    system : DesignSystem
        Design system, penalty included.
    y : np.ndarray
        (n,) responses at the design points of the system.
    config : Optional[FitConfig]
        Configuration, used for the solver name and recorded in the result.

    Returns
    -------
    result : FitResult
        Fit result.
    """
    config = config or FitConfig(K_n=system.K_n, lambda_star=system.lambda_star)
    problem = QPProblem.from_response(system, y)
    solution = QPSolverStrategies.from_name(config.solver).create_solver().solve(problem)

    return FitResult(
        coefficients=solution.b_hat,
        system=system,
        solution=solution,
        fitted_fn=PiecewisePolyFn.linear_interpolant(system.grid.interior_knots, solution.b_hat),
        config=config,
        ybar=problem.ybar
    )


def _is_uniform_design(x: np.ndarray) -> bool:
    n = x.size

    return bool(np.allclose(x, np.arange(1, n + 1) / n, rtol=0.0, atol=1e-12))


def fit(
        x: np.ndarray,
        y: np.ndarray,
        config: Optional[FitConfig] = None
) -> FitResult:
    """
    Fit a convex linear P-spline to the data (x_i, y_i).

    Parameters
    ----------
    x : np.ndarray
        (n,) sorted design points in (0, 1]. Points i / n with n a multiple of K_n give the simulation-mode design.
    y : np.ndarray
        (n,) responses.
    config : Optional[FitConfig]
        Configuration. K_n and lambda_star default to the tuning rule.

    Returns
    -------
    result : FitResult
        Fit result whose fitted function is convex.
    """
    config = config or FitConfig()
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()

    if x.size != y.size:
        raise InvalidArgumentError(f"x and y must have the same length, got {x.size} and {y.size}.")
    if x.size == 0:
        raise InvalidArgumentError("Cannot fit an empty sample.")
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
        raise InvalidArgumentError("x and y must be finite.")
    if np.any(x <= 0.0) or np.any(x > 1.0):
        raise InvalidArgumentError(f"x must lie in (0, 1], got values in [{np.min(x)}, {np.max(x)}].")
    if np.any(np.diff(x) < 0.0):
        raise InvalidArgumentError("x must be sorted in increasing order.")

    n = x.size
    K_n = config.K_n if config.K_n is not None else choose_tuning(n, config.r).K_n
    grid = build_knots(K_n)

    if _is_uniform_design(x) and n % K_n == 0 and n >= 2 * K_n:
        system = build_design(grid, n, lambda_star=0.0)
    else:
        system = build_design(grid, n, lambda_star=0.0, x=x)

    lambda_star = config.lambda_star if config.lambda_star is not None else system.beta_n / K_n
    system = system.with_lambda_star(lambda_star)

    return fit_design(system, y, config)


def predict(
        result: FitResult,
        x: Union[float, np.ndarray]
) -> Union[float, np.ndarray]:
    """
    Evaluate the fitted spline sum_k b_k B_k(x).

    Parameters
    ----------
    result : FitResult
        Fit result.
    x : Union[float, np.ndarray]
        Points of [0, 1].

    Returns
    -------
    value : Union[float, np.ndarray]
        Fitted values.
    """
    return evaluate_spline(result.system.grid, result.coefficients, x)


def noise_free_fit(
        f_true: TruthFunction,
        n: int,
        K_n: int,
        lambda_star: Optional[float] = None
) -> FitResult:
    """
    Fit on the noise-free responses f(i / n), the reference of the bias and stochastic error decomposition.

    Parameters
    ----------
    f_true : TruthFunction
        Function evaluable on (0, 1].
    n : int
        Sample size, a multiple of K_n.
    K_n : int
        Number of intervals.
    lambda_star : Optional[float]
        Unnormalized penalty. Defaults to beta_n / K_n.

    Returns
    -------
    result : FitResult
        Noise-free fit.
    """
    system = build_design(build_knots(K_n), n, lambda_star=0.0)
    system = system.with_lambda_star(system.beta_n / K_n if lambda_star is None else lambda_star)

    return fit_design(system, np.asarray(f_true(system.x), dtype=float), FitConfig(K_n=K_n, lambda_star=lambda_star))


def interpolation_bias(
        f_true: TruthFunction,
        K_n: int,
        eval_grid_size: int = 10_000
) -> float:
    """
    Sup-norm distance between f and its linear interpolant at the knots, on a uniform grid completed with the knots.
    """
    knots = build_knots(K_n).interior_knots
    interpolant = PiecewisePolyFn.linear_interpolant(knots, np.asarray(f_true(knots), dtype=float))
    points = np.union1d(np.linspace(0.0, 1.0, eval_grid_size), knots)

    return float(np.max(np.abs(interpolant(points) - np.asarray(f_true(points), dtype=float))))


def read_xy_csv(path: str) -> pd.DataFrame:
    """
    Read a two-column (x, y) CSV file. A single header row is detected when its fields are not numbers, and blank
    rows are skipped. Errors name the line of the file, blank lines included.

    Parameters
    ----------
    path : str
        Path to the CSV file.

    Returns
    -------
    data : pd.DataFrame
        Columns x and y as floats.
    """
    try:
        raw = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise InvalidArgumentError(f"The file {path} is empty.") from None
    except pd.errors.ParserError as error:
        raise InvalidArgumentError(f"Cannot parse {path}: {error}.") from None

    if raw.shape[1] != 2:
        raise InvalidArgumentError(f"Expected two columns (x, y) in {path}, got {raw.shape[1]}.")

    # The index of raw is the 0-based line number of the file.
    raw = raw[raw.notna().any(axis=1)]
    if raw.empty:
        raise InvalidArgumentError(f"The file {path} is empty.")

    values = raw.apply(pd.to_numeric, errors="coerce")
    if values.iloc[0].isna().all():
        values = values.iloc[1:]
        if values.empty:
            raise InvalidArgumentError(f"The file {path} holds a header but no data.")

    invalid = values.isna().any(axis=1).to_numpy()
    if invalid.any():
        line = int(values.index[np.argmax(invalid)]) + 1
        raise InvalidArgumentError(f"Cannot parse line {line} of {path} as (x, y).")

    values.columns = ["x", "y"]

    return values.reset_index(drop=True).astype(float)
