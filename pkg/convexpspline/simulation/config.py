"""
    @file:              config.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the RiskStudyConfig class and its loading from a YAML file.
"""

from dataclasses import dataclass, field
import logging
from typing import Any, Dict, Optional, Tuple

import yaml

from convexpspline.simulation.truths import TruthStrategies
from convexpspline.utils.exceptions import ConfigError
from convexpspline.utils.tools import is_path_valid

_logger = logging.getLogger(__name__)

REQUIRED_KEYS = ("truth", "r", "L", "sigma", "n_grid", "replicates", "base_seed")
OPTIONAL_KEYS = ("eval_grid_size", "truth_params")

MIN_REPLICATES = 30


@dataclass(frozen=True)
class RiskStudyConfig:
    """
    Configuration of a Monte Carlo sup-norm risk study.

    Elements
    --------
    truth : str
        Name of the regression function, see TruthStrategies.
    r : float
        Holder order assumed by the tuning rule, in (1, 2].
    L : float
        Holder constant of the truth.
    sigma : float
        Noise level. Zero gives noise-free replicates.
    n_grid : Tuple[int, ...]
        Increasing requested sample sizes, each adjusted up to a multiple of its K_n.
    replicates : int
        Replicates per sample size, at least 30.
    base_seed : int
        Nonnegative 64-bit seed of the study.
    eval_grid_size : Optional[int]
        Uniform grid size of the sup-norm evaluation, 10 max(n_grid) by default.
    truth_params : Dict[str, Any]
        Extra parameters of the truth.
    """
    truth: str
    r: float
    L: float
    sigma: float
    n_grid: Tuple[int, ...]
    replicates: int
    base_seed: int
    eval_grid_size: Optional[int] = None
    truth_params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.truth not in TruthStrategies.get_available_names():
            raise ConfigError(
                f"Unknown truth {self.truth!r}, available truths are {TruthStrategies.get_available_names()}.",
                key="truth"
            )
        if not 1.0 < self.r <= 2.0:
            raise ConfigError(f"r must be in (1, 2], got {self.r}.", key="r")
        if self.L <= 0.0:
            raise ConfigError(f"L must be positive, got {self.L}.", key="L")
        if self.sigma < 0.0:
            raise ConfigError(f"sigma must be nonnegative, got {self.sigma}.", key="sigma")
        if len(self.n_grid) == 0 or any(b <= a for a, b in zip(self.n_grid[:-1], self.n_grid[1:])):
            raise ConfigError(f"n_grid must be a nonempty increasing list, got {list(self.n_grid)}.", key="n_grid")
        if self.n_grid[0] < 16:
            raise ConfigError(f"Sample sizes must be at least 16, got {self.n_grid[0]}.", key="n_grid")
        if self.replicates < MIN_REPLICATES:
            raise ConfigError(f"replicates must be at least {MIN_REPLICATES}, got {self.replicates}.", key="replicates")
        if not 0 <= self.base_seed < 2 ** 64:
            raise ConfigError(f"base_seed must be a nonnegative 64-bit integer, got {self.base_seed}.", key="base_seed")
        if self.eval_grid_size is not None and self.eval_grid_size < 2:
            raise ConfigError(f"eval_grid_size must be at least 2, got {self.eval_grid_size}.", key="eval_grid_size")

    @property
    def resolved_eval_grid_size(self) -> int:
        return self.eval_grid_size if self.eval_grid_size is not None else 10 * max(self.n_grid)

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "RiskStudyConfig":
        """
        Build the configuration from a mapping.

        Parameters
        ----------
        values : Dict[str, Any]
            Keys REQUIRED_KEYS and optionally OPTIONAL_KEYS.

        Returns
        -------
        config : RiskStudyConfig
            Validated configuration.
        """
        if not isinstance(values, dict):
            raise ConfigError("The risk study configuration must be a mapping of keys to values.")

        for key in REQUIRED_KEYS:
            if key not in values:
                raise ConfigError(f"Missing configuration key '{key}'.", key=key)
        unknown = sorted(set(values) - set(REQUIRED_KEYS) - set(OPTIONAL_KEYS))
        if unknown:
            raise ConfigError(f"Unknown configuration key '{unknown[0]}'.", key=unknown[0])

        try:
            return cls(
                truth=str(values["truth"]),
                r=float(values["r"]),
                L=float(values["L"]),
                sigma=float(values["sigma"]),
                n_grid=tuple(int(n) for n in values["n_grid"]),
                replicates=int(values["replicates"]),
                base_seed=int(values["base_seed"]),
                eval_grid_size=None if values.get("eval_grid_size") is None else int(values["eval_grid_size"]),
                truth_params=dict(values.get("truth_params") or {})
            )
        except (TypeError, ValueError) as error:
            if isinstance(error, ConfigError):
                raise
            raise ConfigError(f"Invalid configuration value: {error}.") from error

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            truth=self.truth,
            r=self.r,
            L=self.L,
            sigma=self.sigma,
            n_grid=list(self.n_grid),
            replicates=self.replicates,
            base_seed=self.base_seed,
            eval_grid_size=self.resolved_eval_grid_size,
            truth_params=dict(self.truth_params)
        )


def load_risk_study_config(path: str) -> RiskStudyConfig:
    """
    Load a risk study configuration from a YAML file.

    Parameters
    ----------
    path : str
        Path to the YAML file.

    Returns
    -------
    config : RiskStudyConfig
        Validated configuration.
    """
    is_path_valid(path)
    with open(path, "r") as yaml_file:
        try:
            values = yaml.safe_load(yaml_file)
        except yaml.YAMLError as error:
            raise ConfigError(f"Cannot parse {path}: {error}.") from error

    _logger.info(f"Loaded risk study configuration from {path}.")

    return RiskStudyConfig.from_dict(values)
