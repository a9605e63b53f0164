import json
import os

import numpy as np
import pytest

from convexpspline.utils.banded import (
    banded_bandwidth,
    cholesky_lower_banded,
    dense_to_lower_banded,
    lower_banded_to_dense,
    solve_spd_dense
)
from convexpspline.utils.exceptions import (
    ConfigError,
    ConvexPSplineError,
    InvalidArgumentError,
    NumericalBreakdownError,
    SolverError,
    SolverStalledError
)
from convexpspline.utils.tools import as_index_set, check_authorization_of_file_creation, save_json


def _pentadiagonal(size):
    matrix = 6.0 * np.eye(size)
    matrix += np.diag(-2.0 * np.ones(size - 1), 1) + np.diag(-2.0 * np.ones(size - 1), -1)
    matrix += np.diag(0.5 * np.ones(size - 2), 2) + np.diag(0.5 * np.ones(size - 2), -2)

    return matrix


def test_banded_storage_preserves_the_matrix():
    matrix = _pentadiagonal(7)
    ab = dense_to_lower_banded(matrix, bandwidth=2)

    assert ab.shape == (3, 7)
    assert np.array_equal(lower_banded_to_dense(ab), matrix)
    assert banded_bandwidth(matrix) == 2


def test_banded_solve_matches_dense_solve():
    matrix = _pentadiagonal(9)
    rhs = np.random.default_rng(3).standard_normal(9)

    assert np.allclose(solve_spd_dense(matrix, rhs, bandwidth=2), np.linalg.solve(matrix, rhs), atol=1e-12)


def test_empty_system_has_empty_solution():
    assert solve_spd_dense(np.zeros((0, 0)), np.zeros(0), bandwidth=2).shape == (0,)


def test_indefinite_matrix_raises_numerical_breakdown():
    matrix = np.array([[1.0, 2.0], [2.0, 1.0]])

    with pytest.raises(NumericalBreakdownError):
        cholesky_lower_banded(dense_to_lower_banded(matrix, bandwidth=1))


def test_error_taxonomy():
    assert issubclass(ConfigError, InvalidArgumentError)
    assert issubclass(InvalidArgumentError, ValueError)
    assert issubclass(SolverStalledError, SolverError)
    assert issubclass(SolverError, RuntimeError)
    assert issubclass(NumericalBreakdownError, ConvexPSplineError)

    error = ConfigError("Missing configuration key 'truth'.", key="truth")
    assert error.key == "truth"
    assert SolverStalledError("stalled", diagnostics=dict(iterations=3)).diagnostics["iterations"] == 3


def test_as_index_set_sorts_and_validates():
    assert as_index_set([3, 1, 3], upper=4) == (1, 3)
    assert as_index_set([], upper=4) == ()

    with pytest.raises(InvalidArgumentError):
        as_index_set([0, 2], upper=4)
    with pytest.raises(InvalidArgumentError):
        as_index_set([5], upper=4)
    with pytest.raises(InvalidArgumentError):
        as_index_set([1.5], upper=4)


def test_save_json_converts_numpy_objects(tmp_path):
    path = os.path.join(tmp_path, "nested", "report")
    save_json(dict(values=np.arange(3), flag=np.bool_(True), scale=np.float64(0.5)), path)

    with open(f"{path}.json") as json_file:
        content = json.load(json_file)

    assert content == dict(values=[0, 1, 2], flag=True, scale=0.5)


def test_file_creation_refuses_overwrite(tmp_path):
    path = os.path.join(tmp_path, "table.csv")
    with open(path, "w") as file:
        file.write("x\n")

    with pytest.raises(FileExistsError):
        check_authorization_of_file_creation(path, overwrite=False)
