"""
    @file:              main.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the command-line front end: fitting, hypothesis family construction and
                        verification, structural scans, risk studies and rate fits, with file-based input and output.
"""

import argparse
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from convexpspline.design.design_system import build_design
from convexpspline.design.knots import build_knots
from convexpspline.estimator.convex_pspline import FitConfig, fit, read_xy_csv
from convexpspline.hypotheses.family import family_for_sample_size
from convexpspline.hypotheses.verifiers import export_family_csv, verify_family
from convexpspline.qp.solver_strategy import QPSolverStrategies
from convexpspline.selection.lipschitz_scan import (
    AlphaSampler,
    count_structure_violations,
    empirical_lipschitz_ratio,
    lipschitz_scan,
    structure_scan,
    summarize_scan
)
from convexpspline.simulation.config import RiskStudyConfig, load_risk_study_config
from convexpspline.simulation.risk import rate_fit, risk_study
from convexpspline.utils.exceptions import (
    CertificateError,
    ConfigError,
    DegenerateDesignError,
    InvalidArgumentError,
    SolverError,
    SolverStalledError,
    StudyInvalidError
)
from convexpspline.utils.tools import check_authorization_of_file_creation, is_path_valid, save_json

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_STUDY = 4

RISK_STUDY_EPILOG = """\
configuration keys (YAML):
  truth           one of quadratic, exponential, power_1_5, family_member, affine
  r               Holder order in (1, 2] used by the tuning rule
  L               Holder constant of the truth
  sigma           noise level, 0 for noise-free replicates
  n_grid          increasing list of sample sizes, each >= 16
  replicates      replicates per sample size, >= 30
  base_seed       nonnegative 64-bit seed
  eval_grid_size  optional, uniform sup-norm grid size (default 10 * max n)
  truth_params    optional mapping, e.g. {j: 1, scale_n: 1000000} for family_member
"""


def _int_list(value: str) -> List[int]:
    try:
        return [int(item) for item in value.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected a comma-separated list of integers, got {value!r}.") from None


def _lambda_list(value: str) -> List[Any]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _write_csv(table: pd.DataFrame, path: str) -> None:
    check_authorization_of_file_creation(path)
    table.to_csv(path, index=False, float_format="%.17g")


def _run_fit(args: argparse.Namespace) -> int:
    is_path_valid(args.input_csv)
    data = read_xy_csv(args.input_csv)
    config = FitConfig(r=args.r, K_n=args.kn, lambda_star=args.lambda_star, solver=args.solver)
    result = fit(data["x"].to_numpy(), data["y"].to_numpy(), config)

    parameters = dict(input_csv=os.path.abspath(args.input_csv), **config.to_dict())
    result.save_json(args.out_json, extra=dict(parameters=parameters))

    if args.predict_grid:
        grid = np.linspace(0.0, 1.0, args.predict_grid)
        path = args.predict_csv or f"{os.path.splitext(args.out_json)[0]}_predict.csv"
        _write_csv(pd.DataFrame(dict(x=grid, fitted=result(grid))), path)

    return EXIT_OK


def _run_family(args: argparse.Namespace) -> int:
    family = family_for_sample_size(args.n, args.r, args.L, args.c0, sigma=args.sigma, p_star=args.p_star)
    export_family_csv(family, args.out_csv)
    if args.out_json:
        save_json(dict(parameters=dict(family.params.to_dict(), n=args.n, sigma=args.sigma)), args.out_json)

    return EXIT_OK


def _run_verify_family(args: argparse.Namespace) -> int:
    if not 0.0 < args.c0 < 0.125:
        raise InvalidArgumentError(f"c0 must be in (0, 1/8), got {args.c0}.")

    report = verify_family(args.r, args.L, args.c0, args.n, sigma=args.sigma, p_star=args.p_star,
                           holder_grid_size=args.holder_grid)
    save_json(report, args.out_json)

    return EXIT_OK


def _scan_parameters(args: argparse.Namespace) -> Dict[str, Any]:
    return dict(K_n=args.kn, M_n=args.mn, lambda_values=args.lam, samples=args.samples, seed=args.seed,
                exhaustive_max_K_n=args.exhaustive_max_kn)


def _run_scan_structure(args: argparse.Namespace) -> int:
    sampler = AlphaSampler(exhaustive_max_K_n=args.exhaustive_max_kn, num_samples=args.samples, seed=args.seed)
    rows = structure_scan(args.kn, args.mn, args.lam, sampler, threads=args.threads)
    _write_csv(rows, args.out_csv)

    violations = count_structure_violations(rows)
    if violations:
        _logger.warning(f"{violations} index sets break the structural bounds.")
    save_json(
        dict(parameters=_scan_parameters(args), num_rows=len(rows), violations=violations,
             cells=summarize_scan(rows).to_dict("records")),
        args.out_json
    )

    return EXIT_OK


def _run_scan_lipschitz(args: argparse.Namespace) -> int:
    sampler = AlphaSampler(exhaustive_max_K_n=args.exhaustive_max_kn, num_samples=args.samples, seed=args.seed)
    result = lipschitz_scan(args.kn, args.mn, args.lam, sampler, lambda_bar=args.lambda_bar, threads=args.threads)
    _write_csv(result.cells, args.out_csv)

    by_K_n = result.cells.groupby("K_n")["max_lipschitz_norm"].max()
    pair_ratios = []
    if args.pairs:
        for cell in result.cells.to_dict("records"):
            system = build_design(build_knots(int(cell["K_n"])), int(cell["K_n"] * cell["M_n"]), lambda_star=0.0)
            system = system.with_lambda_star(cell["lambda"] * system.beta_n)
            ratio = empirical_lipschitz_ratio(system, num_pairs=args.pairs, seed=args.seed)
            pair_ratios.append(dict(K_n=cell["K_n"], M_n=cell["M_n"], lam=cell["lambda"], max_pair_ratio=ratio,
                                    below_scan_max=ratio <= cell["max_lipschitz_norm"] + 1e-6))

    save_json(
        dict(
            parameters=dict(_scan_parameters(args), lambda_bar=args.lambda_bar, pairs=args.pairs),
            max_lipschitz_norm_by_K_n={str(K_n): value for K_n, value in by_K_n.items()},
            max_over_min_across_K_n=float(by_K_n.max() / by_K_n.min()),
            dominance_violations=int(result.cells["dominance_violations"].sum()),
            pair_ratios=pair_ratios
        ),
        args.out_json
    )

    return EXIT_OK


def _run_risk_study(args: argparse.Namespace) -> int:
    config = load_risk_study_config(args.config)
    if args.seed is not None:
        values = config.to_dict()
        values["base_seed"] = args.seed
        config = RiskStudyConfig.from_dict(values)

    result = risk_study(config, threads=args.threads)
    result.save(args.out_dir)

    return EXIT_OK


def _run_rate_fit(args: argparse.Namespace) -> int:
    is_path_valid(args.input_csv)
    table = pd.read_csv(args.input_csv)
    for column in ("n", "mean_sup_error"):
        if column not in table.columns:
            raise InvalidArgumentError(f"The risk table {args.input_csv} has no column '{column}'.")

    rate = rate_fit(table)
    payload = dict(parameters=dict(input_csv=os.path.abspath(args.input_csv)), **rate._asdict())
    if args.r is not None:
        payload["target_exponent"] = args.r / (2.0 * args.r + 1.0)
    save_json(payload, args.out_json)

    return EXIT_OK


def _add_scan_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kn", type=_int_list, required=True, help="Comma-separated numbers of intervals K_n.")
    parser.add_argument("--mn", type=_int_list, required=True, help="Comma-separated values of M_n = n / K_n.")
    parser.add_argument("--lam", type=_lambda_list, default=["1/K"],
                        help="Comma-separated normalized penalties; '1/K' stands for 1 / K_n. Default: 1/K.")
    parser.add_argument("--samples", type=int, default=200, help="Sampled index sets per cell when K_n is large.")
    parser.add_argument("--exhaustive-max-kn", type=int, default=10, help="Largest K_n scanned exhaustively.")
    parser.add_argument("--seed", type=int, default=0, help="Seed of the sampled index sets.")
    parser.add_argument("--threads", type=int, default=1, help="Number of worker threads.")
    parser.add_argument("--out-csv", required=True, help="Output CSV path.")
    parser.add_argument("--out-json", required=True, help="Output JSON summary path.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convexpspline",
        description="Convex linear P-spline regression, minimax hypothesis families and sup-norm risk studies."
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO logs, -vv for DEBUG logs.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    fit_parser = subparsers.add_parser("fit", help="Fit a convex P-spline to an (x, y) CSV file.")
    fit_parser.add_argument("input_csv", help="Two-column CSV of (x, y) with x in (0, 1], optional header.")
    fit_parser.add_argument("--r", type=float, default=2.0, help="Assumed Holder order in (1, 2].")
    fit_parser.add_argument("--kn", type=int, default=None, help="Number of intervals, overrides the tuning rule.")
    fit_parser.add_argument("--lambda-star", type=float, default=None, help="Penalty, overrides beta_n / K_n.")
    fit_parser.add_argument("--solver", choices=QPSolverStrategies.get_available_names(), default="active_set")
    fit_parser.add_argument("--out-json", required=True, help="Output JSON path.")
    fit_parser.add_argument("--predict-grid", type=int, default=0, help="Size of a uniform grid of fitted values.")
    fit_parser.add_argument("--predict-csv", default=None, help="Path of the fitted values CSV.")
    fit_parser.set_defaults(handler=_run_fit)

    family_parser = subparsers.add_parser("family", help="Export the hypothesis family at sample size n.")
    verify_parser = subparsers.add_parser("verify-family", help="Check the conditions of the hypothesis family.")
    for sub in (family_parser, verify_parser):
        sub.add_argument("--r", type=float, required=True, help="Holder order in (1, 2].")
        sub.add_argument("--L", type=float, default=1.0, help="Holder constant.")
        sub.add_argument("--c0", type=float, default=1.0 / 16.0, help="Constant in (0, 1/8).")
        sub.add_argument("--p-star", type=float, default=None, help="Divergence coefficient, 1 / (2 sigma^2) by default.")
        sub.add_argument("--n", type=int, required=True, help="Sample size.")
        sub.add_argument("--sigma", type=float, default=1.0, help="Noise level.")
    family_parser.add_argument("--out-csv", required=True, help="Output CSV of the pieces.")
    family_parser.add_argument("--out-json", default=None, help="Optional JSON of the parameters.")
    family_parser.set_defaults(handler=_run_family)
    verify_parser.add_argument("--holder-grid", type=int, default=2048, help="Uniform grid size of the Holder check.")
    verify_parser.add_argument("--out-json", required=True, help="Output JSON report.")
    verify_parser.set_defaults(handler=_run_verify_family)

    structure_parser = subparsers.add_parser("scan-structure", help="Check the structure of G and H over index sets.")
    _add_scan_arguments(structure_parser)
    structure_parser.set_defaults(handler=_run_scan_structure)

    lipschitz_parser = subparsers.add_parser("scan-lipschitz", help="Scan the norms of the selection functions.")
    _add_scan_arguments(lipschitz_parser)
    lipschitz_parser.add_argument("--lambda-bar", type=float, default=0.5, help="Largest admissible lambda.")
    lipschitz_parser.add_argument("--pairs", type=int, default=0, help="Random response pairs per cell.")
    lipschitz_parser.set_defaults(handler=_run_scan_lipschitz)

    risk_parser = subparsers.add_parser(
        "risk-study",
        help="Monte Carlo sup-norm risk study.",
        epilog=RISK_STUDY_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    risk_parser.add_argument("--config", required=True, help="YAML configuration file.")
    risk_parser.add_argument("--out-dir", required=True, help="Output directory of risk_table.csv and risk_summary.json.")
    risk_parser.add_argument("--threads", type=int, default=1, help="Number of worker threads.")
    risk_parser.add_argument("--seed", type=int, default=None, help="Overrides base_seed of the configuration.")
    risk_parser.set_defaults(handler=_run_risk_study)

    rate_parser = subparsers.add_parser("rate-fit", help="Fit the rate exponent of a risk table.")
    rate_parser.add_argument("input_csv", help="Risk table with the columns n and mean_sup_error.")
    rate_parser.add_argument("--r", type=float, default=None, help="Holder order, to report the target exponent.")
    rate_parser.add_argument("--out-json", required=True, help="Output JSON path.")
    rate_parser.set_defaults(handler=_run_rate_fit)

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    package_logger = logging.getLogger("convexpspline")
    package_logger.setLevel(level)
    for handler in package_logger.handlers:
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Parameters
    ----------
    argv : Optional[Sequence[str]]
        Arguments, sys.argv[1:] by default.

    Returns
    -------
    exit_code : int
        0 on success, 2 for invalid input or configuration, 3 for solver failures and 4 for invalid studies.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    handler: Callable[[argparse.Namespace], int] = args.handler

    try:
        return handler(args)
    except ConfigError as error:
        _logger.error(f"Invalid configuration{f' (key {error.key!r})' if error.key else ''}: {error}")
        return EXIT_INPUT
    except (InvalidArgumentError, DegenerateDesignError, FileNotFoundError, FileExistsError) as error:
        _logger.error(f"Invalid input: {error}")
        return EXIT_INPUT
    except (SolverStalledError, CertificateError) as error:
        _logger.error(f"Solver failure: {error} Diagnostics: {error.diagnostics}")
        return EXIT_SOLVER
    except SolverError as error:
        _logger.error(f"Solver failure: {error}")
        return EXIT_SOLVER
    except StudyInvalidError as error:
        _logger.error(f"Invalid study: {error}")
        return EXIT_STUDY


if __name__ == "__main__":
    sys.exit(main())
