"""
    @file:              risk.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the Monte Carlo sup-norm risk study of the convex P-spline estimator, the
                        fit of its rate exponent and the shape checks of the bias and stochastic error terms.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math
import os
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats
from tqdm import tqdm

from convexpspline.design.design_system import DesignSystem, build_design
from convexpspline.design.knots import build_knots
from convexpspline.estimator.convex_pspline import FitConfig, FitResult, fit_design, interpolation_bias
from convexpspline.estimator.tuning import simulation_sample_size
from convexpspline.simulation.config import RiskStudyConfig
from convexpspline.simulation.data_generation import generate_data
from convexpspline.simulation.truths import make_truth
from convexpspline.utils.exceptions import InsufficientDataError, InvalidArgumentError, SolverError, StudyInvalidError
from convexpspline.utils.tools import check_authorization_of_file_creation, save_json

_logger = logging.getLogger(__name__)

Truth = Callable[[np.ndarray], np.ndarray]

RISK_COLUMNS = [
    "n",
    "requested_n",
    "K_n",
    "lambda_star",
    "mean_sup_error",
    "std_error",
    "median_sup_error",
    "mean_bias_part",
    "mean_stochastic_part",
    "failures",
    "replicates"
]

BIAS_COLUMNS = ["K_n", "n", "lam", "r", "L", "bias", "interpolation_bias", "scaled_bias"]


class DefaultParams:
    MAX_FAILURE_RATE = 0.05
    MIN_RATE_ROWS = 4
    TREND_STANDARD_ERRORS = 2.0


class RateFit(NamedTuple):
    exponent: float
    stderr: float
    intercept: float
    r_squared: float


class BiasConstantsFit(NamedTuple):
    C1: float
    C2: float
    residual: float
    r_squared: float
    num_rows: int


class ScalingFit(NamedTuple):
    constant: float
    r_squared: float
    ratio_max_min: float


def sup_norm_error(
        fitted: Union[FitResult, Truth],
        truth: Truth,
        eval_grid_size: int
) -> float:
    """
    Sup-norm distance between a fit and the truth.

    The maximum is taken over a uniform grid of eval_grid_size points completed with the knots of the fit and the
    endpoints 0 and 1. It lower-bounds the true sup-norm and is exact when the truth is piecewise linear with
    breakpoints on these points.

    Parameters
    ----------
    fitted : Union[FitResult, Truth]
        Fit result or any function on [0, 1].
    truth : Truth
        Regression function.
    eval_grid_size : int
        Number of uniform grid points, at least 2.

    Returns
    -------
    error : float
        Measured sup-norm error.
    """
    if eval_grid_size < 2:
        raise InvalidArgumentError(f"eval_grid_size must be at least 2, got {eval_grid_size}.")

    points = np.linspace(0.0, 1.0, eval_grid_size)
    if isinstance(fitted, FitResult):
        points = np.union1d(points, fitted.knots)

    return float(np.max(np.abs(np.asarray(fitted(points), dtype=float) - np.asarray(truth(points), dtype=float))))


def rate_fit(rows: Union[pd.DataFrame, Sequence[Dict[str, float]]]) -> RateFit:
    """
    Ordinary least squares fit of log(mean_sup_error) against log(log(n) / n).

    Parameters
    ----------
    rows : Union[pd.DataFrame, Sequence[Dict[str, float]]]
        Rows holding at least the columns 'n' and 'mean_sup_error'.

    Returns
    -------
    rate : RateFit
        Slope (the rate exponent), its standard error, the intercept and R^2.
    """
    table = pd.DataFrame(rows)
    if len(table) < DefaultParams.MIN_RATE_ROWS:
        raise InsufficientDataError(f"A rate fit needs at least {DefaultParams.MIN_RATE_ROWS} rows, got {len(table)}.")

    n = table["n"].to_numpy(dtype=float)
    risk = table["mean_sup_error"].to_numpy(dtype=float)
    if np.any(n < 3):
        raise InvalidArgumentError(f"Sample sizes must be at least 3, got {n.min()}.")
    if np.any(~np.isfinite(risk)) or np.any(risk <= 0.0):
        raise InvalidArgumentError("The risks of a rate fit must be positive and finite.")

    regression = stats.linregress(np.log(np.log(n) / n), np.log(risk))

    return RateFit(
        exponent=float(regression.slope),
        stderr=float(regression.stderr),
        intercept=float(regression.intercept),
        r_squared=float(regression.rvalue ** 2)
    )


def scaling_fit(
        values: Sequence[float],
        scale: Sequence[float]
) -> ScalingFit:
    """
    Least squares fit of values ~ c * scale through the origin.

    Parameters
    ----------
    values : Sequence[float]
        Measured quantities.
    scale : Sequence[float]
        Positive reference shape, e.g. sqrt(K_n log n / n).

    Returns
    -------
    fit : ScalingFit
        The constant c, the uncentered R^2 of the fit and max/min of values / scale.
    """
    values = np.asarray(values, dtype=float)
    scale = np.asarray(scale, dtype=float)
    if values.shape != scale.shape or values.size < 2:
        raise InsufficientDataError(f"Need at least two matching values and scales, got {values.size} and {scale.size}.")
    if np.any(scale <= 0.0):
        raise InvalidArgumentError("The scale must be positive.")

    constant = float(np.dot(values, scale) / np.dot(scale, scale))
    total = float(np.dot(values, values))
    residual = float(np.sum((values - constant * scale) ** 2))
    ratios = values / scale

    return ScalingFit(
        constant=constant,
        r_squared=1.0 - residual / total if total > 0.0 else 1.0,
        ratio_max_min=float(np.max(ratios) / np.min(ratios)) if np.min(ratios) > 0.0 else math.inf
    )


@dataclass(frozen=True)
class RiskStudyResult:
    """
    Result of a risk study.

    Elements
    --------
    config : RiskStudyConfig
        Configuration of the study.
    rows : pd.DataFrame
        One row per sample size with the columns RISK_COLUMNS, ordered by n.
    rate : Optional[RateFit]
        Rate fit of the rows, None when it is not defined (fewer than 4 rows or a zero risk).
    monotone_trend : bool
        Whether mean_sup_error is non-increasing in n up to 2 standard errors.
    split_consistent : bool
        Whether mean_sup_error <= mean_bias_part + mean_stochastic_part + 2 std_error on every row.
    """
    config: RiskStudyConfig
    rows: pd.DataFrame
    rate: Optional[RateFit]
    monotone_trend: bool
    split_consistent: bool

    @property
    def target_exponent(self) -> float:
        return self.config.r / (2.0 * self.config.r + 1.0)

    @property
    def rate_exponent(self) -> float:
        return self.rate.exponent if self.rate is not None else math.nan

    @property
    def rate_stderr(self) -> float:
        return self.rate.stderr if self.rate is not None else math.nan

    @property
    def strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.rows["mean_sup_error"].to_numpy()) < 0.0))

    def summary(self) -> Dict[str, Any]:
        return dict(
            parameters=self.config.to_dict(),
            rate_exponent=self.rate_exponent,
            rate_stderr=self.rate_stderr,
            rate_intercept=self.rate.intercept if self.rate is not None else math.nan,
            rate_r_squared=self.rate.r_squared if self.rate is not None else math.nan,
            target_exponent=self.target_exponent,
            monotone_trend=self.monotone_trend,
            strictly_decreasing=self.strictly_decreasing,
            split_consistent=self.split_consistent,
            total_failures=int(self.rows["failures"].sum())
        )

    def save(self, out_dir: str, overwrite: bool = True) -> Tuple[str, str]:
        """
        Write the risk table and the summary.

        Parameters
        ----------
        out_dir : str
            Output directory, created if needed.
        overwrite : bool
            Overwrite existing files.

        Returns
        -------
        csv_path, json_path : Tuple[str, str]
            Paths of the written files.
        """
        csv_path = os.path.join(out_dir, "risk_table.csv")
        json_path = os.path.join(out_dir, "risk_summary.json")

        check_authorization_of_file_creation(csv_path, overwrite)
        self.rows.to_csv(csv_path, index=False, float_format="%.17g")
        save_json(self.summary(), json_path, overwrite)

        return csv_path, json_path


def _monotone_trend(rows: pd.DataFrame) -> bool:
    mean = rows["mean_sup_error"].to_numpy()
    se = rows["std_error"].to_numpy()
    slack = DefaultParams.TREND_STANDARD_ERRORS * np.maximum(se[:-1], se[1:])

    return bool(np.all(mean[1:] <= mean[:-1] + slack))


def _split_consistent(rows: pd.DataFrame) -> bool:
    bound = rows["mean_bias_part"] + rows["mean_stochastic_part"] + 2.0 * rows["std_error"]

    return bool(np.all(rows["mean_sup_error"].to_numpy() <= bound.to_numpy() * (1.0 + 1e-12) + 1e-15))


def _replicate(
        system: DesignSystem,
        fit_config: FitConfig,
        truth: Truth,
        reference: FitResult,
        config: RiskStudyConfig,
        replicate: int
) -> Optional[Tuple[float, float]]:
    """
    Sup-norm error and stochastic part of one replicate, None when the solver fails.
    """
    _, y = generate_data(truth, system.n, config.sigma, config.base_seed, replicate)
    try:
        result = fit_design(system, y, fit_config)
    except SolverError as error:
        _logger.warning(f"Replicate {replicate} at n = {system.n} failed: {error}")
        return None

    # Both fits interpolate their coefficients on the same knots.
    stochastic = float(np.max(np.abs(result.coefficients - reference.coefficients)))

    return sup_norm_error(result, truth, config.resolved_eval_grid_size), stochastic


def _study_row(
        config: RiskStudyConfig,
        truth: Truth,
        requested_n: int,
        threads: int
) -> Dict[str, Any]:
    n, rule = simulation_sample_size(requested_n, config.r)
    system = build_design(build_knots(rule.K_n), n, lambda_star=0.0)
    system = system.with_lambda_star(rule.lambda_star(system.beta_n))
    fit_config = FitConfig(r=config.r, K_n=rule.K_n, lambda_star=system.lambda_star)

    try:
        reference = fit_design(system, np.asarray(truth(system.x), dtype=float), fit_config)
    except SolverError as error:
        raise StudyInvalidError(f"The noise-free fit at n = {n} failed: {error}") from error
    bias = sup_norm_error(reference, truth, config.resolved_eval_grid_size)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        outcomes = list(tqdm(
            executor.map(lambda k: _replicate(system, fit_config, truth, reference, config, k), range(config.replicates)),
            total=config.replicates,
            desc=f"n = {n}",
            leave=False
        ))

    successes = [outcome for outcome in outcomes if outcome is not None]
    failures = config.replicates - len(successes)
    if failures > DefaultParams.MAX_FAILURE_RATE * config.replicates:
        raise StudyInvalidError(
            f"{failures} of {config.replicates} replicates failed at n = {n}, above the "
            f"{DefaultParams.MAX_FAILURE_RATE:.0%} limit."
        )

    errors = np.array([outcome[0] for outcome in successes])
    stochastic = np.array([outcome[1] for outcome in successes])
    std_error = float(np.std(errors, ddof=1) / math.sqrt(errors.size)) if errors.size > 1 else math.nan

    _logger.info(f"n = {n} (K_n = {rule.K_n}): mean sup-norm error {errors.mean():.6g}, bias part {bias:.6g}.")

    return dict(
        n=n,
        requested_n=int(requested_n),
        K_n=rule.K_n,
        lambda_star=system.lambda_star,
        mean_sup_error=float(errors.mean()),
        std_error=std_error,
        median_sup_error=float(np.median(errors)),
        mean_bias_part=bias,
        mean_stochastic_part=float(stochastic.mean()),
        failures=failures,
        replicates=config.replicates
    )


def risk_study(
        config: RiskStudyConfig,
        threads: int = 1
) -> RiskStudyResult:
    """
    Monte Carlo estimate of the sup-norm risk E||f_hat - f|| over the sample sizes of the configuration.

    For each requested n the tuning rule gives K_n, n is raised to a multiple of K_n and the design is built once. The
    bias part is the error of the noise-free fit f_bar and the stochastic part of a replicate is ||f_hat - f_bar||.
    Replicates are independent counter-based streams, so the result does not depend on the number of threads.

    Parameters
    ----------
    config : RiskStudyConfig
        Study configuration.
    threads : int
        Number of worker threads for the replicates.

    Returns
    -------
    result : RiskStudyResult
        Risk table, rate fit and consistency flags.
    """
    truth = make_truth(config.truth, r=config.r, L=config.L, sigma=config.sigma, params=config.truth_params)

    rows = pd.DataFrame(
        [_study_row(config, truth, requested_n, threads) for requested_n in config.n_grid],
        columns=RISK_COLUMNS
    )

    rate = None
    if len(rows) < DefaultParams.MIN_RATE_ROWS:
        _logger.warning(f"No rate fit with {len(rows)} sample sizes, at least {DefaultParams.MIN_RATE_ROWS} are needed.")
    elif np.any(rows["mean_sup_error"] <= 0.0):
        _logger.warning("No rate fit, some mean sup-norm errors are zero.")
    else:
        rate = rate_fit(rows)
        _logger.info(f"Fitted rate exponent {rate.exponent:.4f} +/- {rate.stderr:.4f}, "
                     f"target {config.r / (2.0 * config.r + 1.0):.4f}.")

    result = RiskStudyResult(
        config=config,
        rows=rows,
        rate=rate,
        monotone_trend=_monotone_trend(rows),
        split_consistent=_split_consistent(rows)
    )
    if not result.monotone_trend:
        _logger.warning("The mean sup-norm error increases with n by more than two standard errors.")

    return result


def compare_truth_rates(results: Dict[str, RiskStudyResult]) -> pd.DataFrame:
    """
    Rate exponents of several studies, one per truth. The worst case over a finite set of truths only lower-bounds the
    supremum over the Holder class, so the maximum risk per n is reported along with the individual rates.

    Parameters
    ----------
    results : Dict[str, RiskStudyResult]
        Studies keyed by a label, sharing the same n grid.

    Returns
    -------
    table : pd.DataFrame
        Columns truth, rate_exponent, rate_stderr and target_exponent, plus a 'max' row whose rate is fitted on the
        largest mean error of each n.
    """
    if not results:
        raise InsufficientDataError("No study to compare.")

    records = [
        dict(truth=label, rate_exponent=result.rate_exponent, rate_stderr=result.rate_stderr,
             target_exponent=result.target_exponent)
        for label, result in results.items()
    ]

    stacked = pd.concat([result.rows[["n", "mean_sup_error"]] for result in results.values()])
    worst = stacked.groupby("n", as_index=False)["mean_sup_error"].max()
    try:
        worst_rate = rate_fit(worst)
        records.append(dict(truth="max", rate_exponent=worst_rate.exponent, rate_stderr=worst_rate.stderr,
                            target_exponent=records[0]["target_exponent"]))
    except InvalidArgumentError as error:
        _logger.warning(f"No rate fit for the worst case: {error}")

    return pd.DataFrame(records)


def bias_study(
        truth: Truth,
        K_list: Sequence[int],
        M_n: int = 64,
        r: float = 2.0,
        eval_grid_size: int = 10_000,
        L: float = 1.0,
        lambda_factors: Sequence[float] = (1.0,)
) -> pd.DataFrame:
    """
    Noise-free sweep over K_n with n = M_n K_n and lambda* = c beta_n / K_n for each factor c, i.e. lambda = c / K_n.

    Parameters
    ----------
    truth : Truth
        Regression function.
    K_list : Sequence[int]
        Numbers of intervals.
    M_n : int
        Design points per interval.
    r : float
        Holder order used to scale the bias.
    eval_grid_size : int
        Uniform grid size of the sup-norm.
    L : float
        Holder constant of the truth, recorded for the bias constants fit.
    lambda_factors : Sequence[float]
        Nonnegative factors c of the penalty. The default keeps the tuning rule lambda* = beta_n / K_n.

    Returns
    -------
    table : pd.DataFrame
        Columns K_n, n, lam, r, L, bias, interpolation_bias and scaled_bias = bias K_n^r.
    """
    if any(factor < 0.0 for factor in lambda_factors):
        raise InvalidArgumentError(f"Penalty factors must be nonnegative, got {list(lambda_factors)}.")

    rows: List[Dict[str, float]] = []
    for K_n in K_list:
        n = M_n * K_n
        design = build_design(build_knots(K_n), n, lambda_star=0.0)
        knot_bias = interpolation_bias(truth, K_n, eval_grid_size)
        for factor in lambda_factors:
            system = design.with_lambda_star(factor * design.beta_n / K_n)
            reference = fit_design(system, np.asarray(truth(system.x), dtype=float))
            bias = sup_norm_error(reference, truth, eval_grid_size)
            rows.append(dict(
                K_n=K_n,
                n=n,
                lam=system.lam,
                r=r,
                L=L,
                bias=bias,
                interpolation_bias=knot_bias,
                scaled_bias=bias * K_n ** r
            ))

    return pd.DataFrame(rows, columns=BIAS_COLUMNS)


def bias_constants_fit(rows: Union[pd.DataFrame, Sequence[pd.DataFrame]]) -> BiasConstantsFit:
    """
    Least squares fit of bias ~ C1 L K_n^(-r) + C2 sqrt(lambda K_n) L K_n^(-r) over bias study rows, possibly of
    several truths.

    Parameters
    ----------
    rows : Union[pd.DataFrame, Sequence[pd.DataFrame]]
        Output of bias_study, or a list of such tables.

    Returns
    -------
    fit : BiasConstantsFit
        Constants C1 and C2, the Euclidean norm of the residuals, the uncentered R^2 and the number of rows.
    """
    table = rows if isinstance(rows, pd.DataFrame) else pd.concat(list(rows), ignore_index=True)
    if len(table) < 2:
        raise InsufficientDataError(f"A bias constants fit needs at least 2 rows, got {len(table)}.")

    K_n = table["K_n"].to_numpy(dtype=float)
    scale = table["L"].to_numpy(dtype=float) * K_n ** -table["r"].to_numpy(dtype=float)
    penalty_weight = np.sqrt(table["lam"].to_numpy(dtype=float) * K_n)
    if np.ptp(penalty_weight) <= 1e-9 * max(1.0, float(np.max(penalty_weight))):
        raise InsufficientDataError("The penalty term is collinear with the interpolation term, vary lambda K_n.")

    regressors = np.column_stack([scale, penalty_weight * scale])
    bias = table["bias"].to_numpy(dtype=float)
    constants = np.linalg.lstsq(regressors, bias, rcond=None)[0]

    residual = bias - regressors @ constants
    total = float(np.dot(bias, bias))

    return BiasConstantsFit(
        C1=float(constants[0]),
        C2=float(constants[1]),
        residual=float(np.linalg.norm(residual)),
        r_squared=1.0 - float(np.dot(residual, residual)) / total if total > 0.0 else 1.0,
        num_rows=len(table)
    )


def save_bias_study(
        rows: pd.DataFrame,
        out_dir: str,
        overwrite: bool = True
) -> Tuple[str, str]:
    """
    Write the bias table and a summary holding the fitted constants.

    Parameters
    ----------
    rows : pd.DataFrame
        Output of bias_study, possibly concatenated over truths.
    out_dir : str
        Output directory, created if needed.
    overwrite : bool
        Overwrite existing files.

    Returns
    -------
    csv_path, json_path : Tuple[str, str]
        Paths of bias_table.csv and bias_summary.json.
    """
    constants = bias_constants_fit(rows)
    csv_path = os.path.join(out_dir, "bias_table.csv")
    json_path = os.path.join(out_dir, "bias_summary.json")

    check_authorization_of_file_creation(csv_path, overwrite)
    rows.to_csv(csv_path, index=False, float_format="%.17g")
    save_json(
        dict(
            constants._asdict(),
            max_scaled_bias_ratio=float(rows["scaled_bias"].max() / rows["scaled_bias"].min())
        ),
        json_path,
        overwrite
    )

    return csv_path, json_path
