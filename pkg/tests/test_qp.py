import numpy as np
import pytest

from convexpspline.design import build_design, build_knots
from convexpspline.qp import (
    ActiveSetSolver,
    EnumerationSolver,
    QPProblem,
    QPSolverStrategies,
    brute_force_solve,
    certify,
    equality_solution,
    kkt_report,
    objective,
    selection_matrix,
    solve
)
from convexpspline.utils.exceptions import CertificateError, InvalidArgumentError, SolverError, SolverStalledError


def _system(K_n, lam, M_n=16):
    system = build_design(build_knots(K_n), M_n * K_n, lambda_star=0.0)

    return system.with_lambda_star(lam * system.beta_n)


def _assert_matches_oracle(system, seeds):
    for seed in seeds:
        ybar = np.random.default_rng(seed).standard_normal(system.K_n + 1)
        problem = QPProblem(system, ybar)
        active_set = solve(problem)
        oracle = brute_force_solve(problem)

        assert certify(problem, active_set)
        assert certify(problem, oracle)
        assert np.max(np.abs(active_set.b_hat - oracle.b_hat)) <= 1e-8
        assert abs(objective(problem, active_set.b_hat) - objective(problem, oracle.b_hat)) <= 1e-10


@pytest.mark.parametrize("K_n", [3, 5, 8])
@pytest.mark.parametrize("lam", [0.0, "1/K", 0.3])
def test_active_set_matches_enumeration(K_n, lam):
    lam = 1.0 / K_n if lam == "1/K" else lam
    _assert_matches_oracle(_system(K_n, lam), seeds=range(10))


@pytest.mark.slow
@pytest.mark.parametrize("K_n", range(3, 11))
@pytest.mark.parametrize("lam", [0.0, "1/K", 0.3])
def test_active_set_matches_enumeration_full_grid(K_n, lam):
    lam = 1.0 / K_n if lam == "1/K" else lam
    _assert_matches_oracle(_system(K_n, lam), seeds=range(100))


def test_convex_spline_data_is_reproduced():
    system = _system(6, 0.0)
    knots = system.grid.interior_knots
    truth = np.maximum(0.0, knots - 0.5) + 0.2 * knots
    y = system.X @ truth
    solution = solve(QPProblem.from_response(system, y))

    assert np.allclose(solution.b_hat, truth, atol=1e-10)


def test_affine_data_is_reproduced_for_any_penalty():
    system = _system(7, 0.4)
    truth = 1.0 - 2.0 * system.grid.interior_knots
    solution = solve(QPProblem.from_response(system, system.X @ truth))

    assert np.allclose(solution.b_hat, truth, atol=1e-10)
    assert solution.active_set == tuple(range(1, 7))


def test_concave_data_gives_convex_fit():
    system = _system(9, 1.0 / 9)
    y = -(system.x - 0.5) ** 2
    problem = QPProblem.from_response(system, y)
    solution = solve(problem)

    assert certify(problem, solution)
    assert np.min(system.D2 @ solution.b_hat) >= -problem.tolerance
    assert np.all(solution.chi >= -problem.tolerance)
    assert len(solution.active_set) > 0
    assert solution.solver == "active_set"


def test_kkt_residuals_are_recorded():
    system = _system(5, 0.2)
    problem = QPProblem(system, np.random.default_rng(11).standard_normal(6))
    solution = solve(problem)

    assert solution.residuals.stationarity <= problem.tolerance
    assert solution.residuals.feasibility >= -problem.tolerance
    assert solution.residuals.complementarity <= problem.tolerance
    assert set(solution.to_dict()) == {"b_hat", "chi", "active_set", "residuals", "iterations", "solver"}


def test_selection_matrix_spans_the_null_space():
    K_n = 8
    alpha = (2, 3, 6)
    F = selection_matrix(alpha, K_n)
    D2 = _system(K_n, 0.0).D2

    assert F.shape == (K_n + 1 - len(alpha), K_n + 1)
    assert np.allclose(D2[np.asarray(alpha) - 1] @ F.T, 0.0, atol=1e-14)
    assert np.array_equal(selection_matrix((), K_n), np.eye(K_n + 1))


def test_equality_solution_without_constraints_is_the_unconstrained_minimizer():
    system = _system(6, 0.25)
    ybar = np.random.default_rng(5).standard_normal(7)

    assert np.allclose(equality_solution(QPProblem(system, ybar), ()), np.linalg.solve(system.Lambda, ybar))


def test_wrong_response_length():
    with pytest.raises(InvalidArgumentError):
        QPProblem(_system(4, 0.0), np.zeros(4))


def test_enumeration_is_limited_to_small_problems():
    system = build_design(build_knots(15), 30, lambda_star=0.0)

    with pytest.raises(InvalidArgumentError):
        brute_force_solve(QPProblem(system, np.zeros(16)))


def test_stalled_solver_reports_diagnostics(monkeypatch):
    monkeypatch.setattr(ActiveSetSolver, "max_iterations", staticmethod(lambda K_n: -1))
    system = _system(4, 0.0)

    with pytest.raises(SolverStalledError) as error:
        solve(QPProblem(system, np.ones(5)))

    assert error.value.diagnostics["K_n"] == 4


def test_solver_strategies():
    assert QPSolverStrategies.get_available_names() == ["active_set", "enumeration"]
    assert isinstance(QPSolverStrategies.from_name("enumeration").create_solver(), EnumerationSolver)

    with pytest.raises(InvalidArgumentError):
        QPSolverStrategies.from_name("interior_point")


def test_uncertified_solution_is_rejected():
    system = _system(5, 0.2)
    problem = QPProblem(system, np.random.default_rng(2).standard_normal(6))

    with pytest.raises(CertificateError) as error:
        ActiveSetSolver()._build_solution(problem, np.zeros(6), (), iterations=0)

    assert isinstance(error.value, SolverError)
    assert error.value.diagnostics["K_n"] == 5
    assert error.value.diagnostics["stationarity"] == pytest.approx(np.max(np.abs(problem.ybar)))
    assert error.value.diagnostics["tolerance"] == pytest.approx(problem.tolerance)


@pytest.mark.parametrize("solver", [solve, brute_force_solve])
def test_zero_response_gives_zero_coefficients(solver):
    solution = solver(QPProblem(_system(6, 1.0 / 6), np.zeros(7)))

    assert np.array_equal(solution.b_hat, np.zeros(7))
    assert np.allclose(solution.chi, 0.0)
    assert solution.residuals.stationarity == 0.0
    assert solution.residuals.complementarity == 0.0


@pytest.mark.parametrize("solver", [solve, brute_force_solve])
def test_strictly_convex_optimum_has_no_active_constraint(solver):
    system = _system(4, 0.25)
    b_star = (np.arange(1, 6) / 4.0) ** 2
    solution = solver(QPProblem(system, system.Lambda @ b_star))

    assert np.allclose(solution.b_hat, b_star, atol=1e-12)
    assert solution.active_set == ()
    assert np.array_equal(solution.chi, np.zeros(3))


def test_kkt_report_of_perturbed_and_infeasible_candidates():
    system = _system(4, 0.25)
    b_star = (np.arange(1, 6) / 4.0) ** 2
    problem = QPProblem(system, system.Lambda @ b_star)
    chi = np.zeros(3)

    exact = kkt_report(problem, b_star, chi)
    assert exact.stationarity <= 1e-9
    assert exact.complementarity <= 1e-9

    for j in range(5):
        perturbed = b_star + np.eye(5)[j]
        residuals = kkt_report(problem, perturbed, chi)
        assert residuals.stationarity == pytest.approx(np.max(np.abs(system.Lambda[:, j])), abs=1e-12)

    infeasible = np.array([0.0, 0.5, 0.5, 0.5, 0.5])
    assert kkt_report(problem, infeasible, chi).feasibility == pytest.approx(-0.5)


def test_solution_is_linear_on_a_fixed_active_set():
    system = _system(8, 1.0 / 8)
    matched = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        ybar_1 = rng.standard_normal(9)
        ybar_2 = ybar_1 + 0.05 * rng.standard_normal(9)
        first, second, total = (solve(QPProblem(system, ybar)) for ybar in (ybar_1, ybar_2, ybar_1 + ybar_2))

        if first.active_set == second.active_set == total.active_set:
            matched += 1
            assert np.allclose(first.b_hat + second.b_hat, total.b_hat, atol=1e-9)

    assert matched > 0
