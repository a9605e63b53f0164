"""
    @file:              tools.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       A collection of functions used across the package to validate paths, write result files and
                        normalize index sets.
"""

import json
import logging
import os
from typing import Any, Dict, Iterable, Tuple

import numpy as np

from .exceptions import InvalidArgumentError

_logger = logging.getLogger(__name__)


def is_path_valid(
        path: str
) -> None:
    """
    Raise a FileNotFoundError if the given path doesn't exist.

    Parameters
    ----------
    path : str
        A path.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Given path {path} does not exist.")


def check_authorization_of_file_creation(
        path: str,
        overwrite: bool = True
) -> None:
    """
    Check if a result file can be written at the given path.

    Parameters
    ----------
    path : str
        Path of the file to write.
    overwrite : bool
        Overwrite an existing file.
    """
    if os.path.exists(path):
        if not overwrite:
            raise FileExistsError(f"The file {path} already exists. You may overwrite it using overwrite = True.")
        else:
            _logger.info(f"Overwriting file with path : {path}.")
    else:
        _logger.info(f"Writing file with path : {path}.")

    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def to_builtin(value: Any) -> Any:
    """
    Recursively convert numpy scalars, arrays and tuples to plain python objects that json can serialize.
    """
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)

    return value


def save_json(
        payload: Dict[str, Any],
        path: str,
        overwrite: bool = True
) -> None:
    """
    Write a dictionary as an indented json file.

    Parameters
    ----------
    payload : Dict[str, Any]
        Content, may hold numpy objects.
    path : str
        Output path. The '.json' extension is appended if missing.
    overwrite : bool
        Overwrite an existing file.
    """
    if not path.endswith(".json"):
        path = f"{path}.json"

    check_authorization_of_file_creation(path, overwrite)
    with open(path, "w") as json_file:
        json.dump(to_builtin(payload), json_file, indent=2, sort_keys=True)
        json_file.write("\n")


def as_index_set(
        indices: Iterable[int],
        upper: int
) -> Tuple[int, ...]:
    """
    Normalize a collection of 1-based constraint indices to a sorted tuple without duplicates.

    Parameters
    ----------
    indices : Iterable[int]
        Indices, each in 1..upper.
    upper : int
        Largest admissible index.

    Returns
    -------
    index_set : Tuple[int, ...]
        Sorted indices.
    """
    values = list(indices)
    if any(isinstance(i, bool) or not float(i).is_integer() for i in values):
        raise InvalidArgumentError(f"Index set {values} contains non-integer entries.")

    index_set = tuple(sorted(set(int(i) for i in values)))
    if index_set and (index_set[0] < 1 or index_set[-1] > upper):
        raise InvalidArgumentError(f"Index set {index_set} is not a subset of {{1, ..., {upper}}}.")

    return index_set
