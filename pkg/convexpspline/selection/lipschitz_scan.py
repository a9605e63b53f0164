"""
    @file:              lipschitz_scan.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the scans of structure reports over grids of (K_n, M_n, lambda) and index
                        sets, the uniform Lipschitz scan of the selection functions and the probe of the smallest
                        M_n = n / K_n for which G is strictly diagonally dominant.
"""

from concurrent.futures import ThreadPoolExecutor
import hashlib
import itertools
import logging
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from convexpspline.design.design_system import DesignSystem, build_design
from convexpspline.design.knots import build_knots
from convexpspline.qp.active_set import solve
from convexpspline.qp.problem import QPProblem
from convexpspline.selection.selection_structure import build_selection
from convexpspline.selection.structure_report import structure_report
from convexpspline.utils.exceptions import InvalidArgumentError

_logger = logging.getLogger(__name__)

LambdaSpec = Union[float, str]


class DefaultParams:
    LAMBDA_BAR = 0.5
    EXHAUSTIVE_MAX_K_N = 10
    NUM_SAMPLES = 200
    MIN_M_N = 8


SCAN_COLUMNS = [
    "K_n", "M_n", "lambda", "alpha_hash", "alpha_size", "lipschitz_norm", "min_xi", "min_xi_tilde", "dominance_ok",
    "g_tridiagonal", "h_bandwidth_ok", "h_bounds_ok", "e_inverse_norm", "xi_f_norm"
]


def alpha_hash(alpha: Tuple[int, ...]) -> str:
    """
    Short stable identifier of an index set.
    """
    return hashlib.sha1(",".join(str(i) for i in alpha).encode()).hexdigest()[:12]


class AlphaSampler:
    """
    Produces the index sets of a scan: every subset of 1..K_n - 1 when K_n is small, otherwise the empty set, the full
    set, the odd indices and independent Bernoulli(1/2) subsets.
    """

    def __init__(
            self,
            exhaustive_max_K_n: int = DefaultParams.EXHAUSTIVE_MAX_K_N,
            num_samples: int = DefaultParams.NUM_SAMPLES,
            seed: int = 0
    ):
        """
        Parameters
        ----------
        exhaustive_max_K_n : int
            Largest K_n whose subsets are all enumerated.
        num_samples : int
            Number of random subsets when K_n is larger.
        seed : int
            Seed of the random subsets. The stream also depends on K_n.
        """
        self.exhaustive_max_K_n = exhaustive_max_K_n
        self.num_samples = num_samples
        self.seed = seed

    def is_exhaustive(self, K_n: int) -> bool:
        return K_n <= self.exhaustive_max_K_n

    def sample(self, K_n: int) -> Iterator[Tuple[int, ...]]:
        """
        Index sets for K_n, without duplicates and in a reproducible order.
        """
        num_constraints = K_n - 1
        if self.is_exhaustive(K_n):
            for mask in range(2 ** num_constraints):
                yield tuple(i + 1 for i in range(num_constraints) if mask >> i & 1)
            return

        rng = np.random.default_rng([self.seed, K_n])
        structured = [(), tuple(range(1, K_n)), tuple(range(1, K_n, 2))]
        random_sets = (
            tuple(int(i) + 1 for i in np.flatnonzero(rng.random(num_constraints) < 0.5))
            for _ in range(self.num_samples)
        )

        seen = set()
        for alpha in itertools.chain(structured, random_sets):
            if alpha not in seen:
                seen.add(alpha)
                yield alpha


def resolve_lambda(spec: LambdaSpec, K_n: int) -> float:
    """
    Numeric lambda of a scan entry. The string '1/K' stands for 1 / K_n.
    """
    if isinstance(spec, str):
        if spec.replace(" ", "").lower() in ("1/k", "1/k_n"):
            return 1.0 / K_n
        try:
            return float(spec)
        except ValueError:
            raise InvalidArgumentError(f"Invalid lambda specification {spec!r}.") from None

    return float(spec)


def _scan_row(system: DesignSystem, alpha: Tuple[int, ...]) -> Dict:
    report = structure_report(build_selection(alpha, system.K_n), system)

    return {
        "K_n": system.K_n,
        "M_n": int(round(system.M_n)),
        "lambda": system.lam,
        "alpha_hash": alpha_hash(alpha),
        "alpha_size": len(alpha),
        "lipschitz_norm": report.lipschitz_norm,
        "min_xi": report.min_xi,
        "min_xi_tilde": report.min_xi_tilde,
        "dominance_ok": report.dominance_ok,
        "g_tridiagonal": report.g_tridiagonal,
        "h_bandwidth_ok": report.h_bandwidth_ok,
        "h_bounds_ok": report.h_bounds_ok,
        "e_inverse_norm": report.e_inverse_norm,
        "xi_f_norm": report.xi_f_norm
    }


def _scan_cell(cell: Tuple[int, int, LambdaSpec], alpha_sampler: AlphaSampler) -> List[Dict]:
    K_n, M_n, lambda_spec = cell
    grid = build_knots(K_n)
    lam = resolve_lambda(lambda_spec, K_n)
    system = build_design(grid, K_n * M_n, lambda_star=0.0)
    system = system.with_lambda_star(lam * system.beta_n)

    return [_scan_row(system, alpha) for alpha in alpha_sampler.sample(K_n)]


def structure_scan(
        K_n_list: Sequence[int],
        M_n_list: Sequence[int],
        lambda_list: Sequence[LambdaSpec],
        alpha_sampler: Optional[AlphaSampler] = None,
        threads: int = 1
) -> pd.DataFrame:
    """
    Structure reports of every sampled index set on every (K_n, M_n, lambda) cell.

    Parameters
    ----------
    K_n_list : Sequence[int]
        Numbers of intervals.
    M_n_list : Sequence[int]
        Values of n / K_n.
    lambda_list : Sequence[LambdaSpec]
        Normalized penalties, '1/K' standing for 1 / K_n.
    alpha_sampler : Optional[AlphaSampler]
        Index set sampler. Defaults to AlphaSampler().
    threads : int
        Number of worker threads. Rows come out in cell order whatever the number of threads.

    Returns
    -------
    rows : pd.DataFrame
        One row per (cell, index set) with the columns SCAN_COLUMNS.
    """
    alpha_sampler = alpha_sampler or AlphaSampler()
    cells = list(itertools.product(K_n_list, M_n_list, lambda_list))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        results = executor.map(lambda cell: _scan_cell(cell, alpha_sampler), cells)
        rows = [row for cell_rows in tqdm(results, total=len(cells), desc="Scanning cells") for row in cell_rows]

    return pd.DataFrame(rows, columns=SCAN_COLUMNS)


def count_structure_violations(rows: pd.DataFrame) -> int:
    """
    Number of rows where G is not tridiagonal and strictly diagonally dominant or H breaks its band or entry bounds.
    """
    violations = ~(rows["g_tridiagonal"] & (rows["min_xi"] > 0.0) & rows["h_bandwidth_ok"] & rows["h_bounds_ok"])

    return int(violations.sum())


class LipschitzScanResult(NamedTuple):
    rows: pd.DataFrame
    cells: pd.DataFrame


def summarize_scan(rows: pd.DataFrame) -> pd.DataFrame:
    """
    Per-cell maxima of a scan.

    Parameters
    ----------
    rows : pd.DataFrame
        Output of structure_scan.

    Returns
    -------
    cells : pd.DataFrame
        One row per (K_n, M_n, lambda) with the number of index sets, the maximal Lipschitz norm, the minimal margin
        of G + lambda H, the number of dominance violations and the maximal row sum of diag(1 / xi_tilde) F_alpha.
    """
    grouped = rows.groupby(["K_n", "M_n", "lambda"], sort=False)

    return grouped.agg(
        num_alphas=("alpha_hash", "size"),
        max_lipschitz_norm=("lipschitz_norm", "max"),
        min_xi_tilde=("min_xi_tilde", "min"),
        dominance_violations=("dominance_ok", lambda ok: int((~ok.astype(bool)).sum())),
        max_e_inverse_norm=("e_inverse_norm", "max"),
        max_xi_f_norm=("xi_f_norm", "max")
    ).reset_index()


def lipschitz_scan(
        K_n_list: Sequence[int],
        M_n_list: Sequence[int],
        lambda_list: Sequence[LambdaSpec],
        alpha_sampler: Optional[AlphaSampler] = None,
        lambda_bar: float = DefaultParams.LAMBDA_BAR,
        threads: int = 1
) -> LipschitzScanResult:
    """
    Maximal infinity norm of the selection functions over index sets, per (K_n, M_n, lambda) cell. A bounded maximum
    across K_n is the empirical evidence of a uniform Lipschitz constant of the solution map ybar -> b_hat.

    Parameters
    ----------
    K_n_list : Sequence[int]
        Numbers of intervals.
    M_n_list : Sequence[int]
        Values of n / K_n, each at least 8.
    lambda_list : Sequence[LambdaSpec]
        Normalized penalties, each at most lambda_bar; '1/K' stands for 1 / K_n.
    alpha_sampler : Optional[AlphaSampler]
        Index set sampler, exhaustive for K_n <= 10 by default.
    lambda_bar : float
        Largest admissible lambda.
    threads : int
        Number of worker threads.

    Returns
    -------
    result : LipschitzScanResult
        Per index set rows and per cell maxima. Dominance violations are recorded, not raised.
    """
    if any(M_n < DefaultParams.MIN_M_N for M_n in M_n_list):
        raise InvalidArgumentError(f"Lipschitz scans need M_n >= {DefaultParams.MIN_M_N}, got {list(M_n_list)}.")
    for K_n in K_n_list:
        for spec in lambda_list:
            if not 0.0 <= resolve_lambda(spec, K_n) <= lambda_bar:
                raise InvalidArgumentError(f"lambda = {spec} is outside [0, {lambda_bar}] for K_n = {K_n}.")

    rows = structure_scan(K_n_list, M_n_list, lambda_list, alpha_sampler, threads)
    cells = summarize_scan(rows)
    for cell in cells.to_dict("records"):
        if cell["dominance_violations"]:
            _logger.warning(
                f"{cell['dominance_violations']} index sets are not diagonally dominant at K_n = {cell['K_n']}, "
                f"M_n = {cell['M_n']}, lambda = {cell['lambda']:.4g}."
            )

    return LipschitzScanResult(rows=rows, cells=cells)


def _g_dominant_for_all(K_n: int, M_n: int, alphas: Sequence[Tuple[int, ...]]) -> bool:
    system = build_design(build_knots(K_n), K_n * M_n, lambda_star=0.0)

    return all(structure_report(build_selection(alpha, K_n), system).g_dominance_ok for alpha in alphas)


def probe_dominance_threshold(
        K_n: int,
        alpha_sampler: Optional[AlphaSampler] = None,
        M_n_max: int = 64
) -> Optional[int]:
    """
    Smallest M_n in 2..M_n_max for which G is strictly diagonally dominant for every sampled index set, found by
    bisection under the assumption that dominance persists as M_n grows.

    Parameters
    ----------
    K_n : int
        Number of intervals.
    alpha_sampler : Optional[AlphaSampler]
        Index set sampler.
    M_n_max : int
        Largest M_n probed.

    Returns
    -------
    threshold : Optional[int]
        Empirical threshold, None if dominance fails at M_n_max.
    """
    alphas = list((alpha_sampler or AlphaSampler()).sample(K_n))
    if not _g_dominant_for_all(K_n, M_n_max, alphas):
        return None

    low, high = 2, M_n_max
    while low < high:
        middle = (low + high) // 2
        if _g_dominant_for_all(K_n, middle, alphas):
            high = middle
        else:
            low = middle + 1

    _logger.info(f"Empirical dominance threshold for K_n = {K_n}: M_n >= {low}.")

    return low


def empirical_lipschitz_ratio(
        system: DesignSystem,
        num_pairs: int = 100,
        seed: int = 0
) -> float:
    """
    Largest ratio ||b_hat(y1) - b_hat(y2)||_inf / ||y1 - y2||_inf over random standard normal pairs of weighted
    responses.

    Parameters
    ----------
    system : DesignSystem
        Design system.
    num_pairs : int
        Number of pairs.
    seed : int
        Seed of the pairs.

    Returns
    -------
    ratio : float
        Largest observed ratio.
    """
    rng = np.random.default_rng(seed)
    ratio = 0.0
    for _ in range(num_pairs):
        first, second = rng.standard_normal((2, system.K_n + 1))
        b_first = solve(QPProblem(system, first)).b_hat
        b_second = solve(QPProblem(system, second)).b_hat
        ratio = max(ratio, float(np.max(np.abs(b_first - b_second)) / np.max(np.abs(first - second))))

    return ratio
