import json
import math

import numpy as np
import pandas as pd
import pytest

from convexpspline.design import build_design, build_knots
from convexpspline.estimator import FitConfig, fit, fit_design, noise_free_fit
from convexpspline.simulation import (
    RiskStudyConfig,
    TruthStrategies,
    bias_constants_fit,
    bias_study,
    compare_truth_rates,
    generate_data,
    load_risk_study_config,
    make_truth,
    noise_stream,
    rate_fit,
    risk_study,
    save_bias_study,
    scaling_fit,
    sup_norm_error
)
from convexpspline.qp.active_set import ActiveSetSolver
from convexpspline.utils.exceptions import ConfigError, InsufficientDataError, InvalidArgumentError, StudyInvalidError


def _config(**overrides):
    values = dict(truth="quadratic", r=2.0, L=1.0, sigma=0.1, n_grid=[64, 128, 256, 512], replicates=30, base_seed=7)
    values.update(overrides)

    return RiskStudyConfig.from_dict(values)


def test_noise_free_data_is_the_truth():
    x, y = generate_data(lambda t: t ** 2, 50, 0.0, base_seed=1)

    assert np.allclose(x, np.arange(1, 51) / 50)
    assert np.array_equal(y, x ** 2)


def test_streams_are_keyed_by_seed_n_and_replicate():
    _, first = generate_data(lambda t: 0.0 * t, 100, 1.0, base_seed=3, replicate=2)
    _, again = generate_data(lambda t: 0.0 * t, 100, 1.0, base_seed=3, replicate=2)
    _, other = generate_data(lambda t: 0.0 * t, 100, 1.0, base_seed=3, replicate=3)

    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)
    assert np.array_equal(noise_stream(3, 100, 2).standard_normal(100), first)


def test_noise_is_centred():
    n = 10 ** 6
    _, y = generate_data(lambda t: 0.0 * t, n, 1.0, base_seed=11)

    assert abs(y.mean()) <= 4.0 / math.sqrt(n)


def test_too_small_sample():
    with pytest.raises(InvalidArgumentError):
        generate_data(lambda t: t, 1, 1.0, base_seed=0)


def test_named_truths():
    x = np.linspace(0.0, 1.0, 5)

    assert sorted(TruthStrategies.get_available_names()) == [
        "affine", "exponential", "family_member", "power_1_5", "quadratic"
    ]
    assert np.allclose(make_truth("quadratic")(x), x ** 2)
    assert np.allclose(make_truth("power_1_5", L=1.5)(x), x ** 1.5)
    assert np.allclose(make_truth("affine", params=dict(intercept=0.0, slope=2.0))(x), 2.0 * x)
    assert make_truth("family_member", r=2.0)(0.0) == 0.0
    with pytest.raises(InvalidArgumentError):
        make_truth("cubic")


def test_sup_norm_of_the_knot_interpolant():
    x = np.arange(1, 65) / 64
    result = fit(x, np.interp(x, np.linspace(0.0, 1.0, 9), np.linspace(0.0, 1.0, 9) ** 2), FitConfig(K_n=8,
                                                                                                      lambda_star=0.0))

    assert sup_norm_error(result, lambda t: t ** 2, 1000) == pytest.approx(1.0 / 256.0, abs=1e-6)
    assert abs(sup_norm_error(result, lambda t: t ** 2, 1000) - sup_norm_error(result, lambda t: t ** 2, 10000)) < 1e-4


def test_sup_norm_of_a_spline_truth_is_zero():
    knots = np.linspace(0.0, 1.0, 5)
    values = np.array([0.2, 0.0, 0.1, 0.4, 1.0])
    truth = lambda t: np.interp(t, knots, values)
    x = np.arange(1, 41) / 40
    result = fit(x, truth(x), FitConfig(K_n=4, lambda_star=0.0))

    assert sup_norm_error(result, truth, 500) <= 1e-10


def test_config_loading(tmp_path):
    path = tmp_path / "study.yaml"
    path.write_text(
        "truth: quadratic\nr: 2\nL: 1\nsigma: 0.1\nn_grid: [256, 512, 1024, 2048]\nreplicates: 40\nbase_seed: 5\n"
    )
    config = load_risk_study_config(str(path))

    assert config.n_grid == (256, 512, 1024, 2048)
    assert config.resolved_eval_grid_size == 20480
    assert config.truth_params == {}


@pytest.mark.parametrize("key", ["truth", "sigma", "n_grid", "base_seed"])
def test_missing_config_key_is_named(key):
    values = dict(truth="quadratic", r=2.0, L=1.0, sigma=0.1, n_grid=[64, 128], replicates=30, base_seed=7)
    del values[key]

    with pytest.raises(ConfigError) as error:
        RiskStudyConfig.from_dict(values)

    assert error.value.key == key


@pytest.mark.parametrize("overrides, key", [
    (dict(replicates=10), "replicates"),
    (dict(n_grid=[128, 64]), "n_grid"),
    (dict(sigma=-0.1), "sigma"),
    (dict(truth="cubic"), "truth"),
    (dict(seed=3), "seed")
])
def test_invalid_config_values(overrides, key):
    with pytest.raises(ConfigError) as error:
        _config(**overrides)

    assert error.value.key == key


def test_risk_study_rows_and_flags():
    result = risk_study(_config())
    rows = result.rows

    assert list(rows["requested_n"]) == [64, 128, 256, 512]
    assert list(rows["K_n"]) == [2, 2, 3, 3]
    assert list(rows["n"]) == [64, 128, 258, 513]
    assert (rows["mean_sup_error"] > 0.0).all()
    assert (rows["failures"] == 0).all()
    assert result.split_consistent
    assert not math.isnan(result.rate_exponent)
    assert result.target_exponent == pytest.approx(0.4)


def test_noise_free_study_has_no_stochastic_part():
    result = risk_study(_config(sigma=0.0))
    rows = result.rows

    assert (rows["mean_stochastic_part"] == 0.0).all()
    assert np.allclose(rows["mean_sup_error"], rows["mean_bias_part"], rtol=1e-12, atol=0.0)


def test_uncertified_replicates_count_as_failures(monkeypatch):
    certified_solve = ActiveSetSolver.solve
    calls = []

    def reference_only(self, problem):
        calls.append(problem.K_n)
        if len(calls) == 1:
            return certified_solve(self, problem)
        return self._build_solution(problem, np.zeros(problem.K_n + 1), (), iterations=0)

    monkeypatch.setattr(ActiveSetSolver, "solve", reference_only)

    with pytest.raises(StudyInvalidError, match="30 of 30 replicates failed"):
        risk_study(_config(n_grid=[64]))


def test_risk_study_does_not_depend_on_threads(tmp_path):
    config = _config(n_grid=[128, 256, 512, 1024])
    single = risk_study(config, threads=1)
    parallel = risk_study(config, threads=8)

    pd.testing.assert_frame_equal(single.rows, parallel.rows, check_exact=True)

    single_paths = single.save(str(tmp_path / "single"))
    parallel_paths = parallel.save(str(tmp_path / "parallel"))
    for first, second in zip(single_paths, parallel_paths):
        with open(first, "rb") as a, open(second, "rb") as b:
            assert a.read() == b.read()


def test_saved_summary(tmp_path):
    result = risk_study(_config())
    _, json_path = result.save(str(tmp_path))

    with open(json_path) as json_file:
        summary = json.load(json_file)

    assert summary["parameters"]["truth"] == "quadratic"
    assert summary["rate_exponent"] == pytest.approx(result.rate_exponent)
    assert set(summary) >= {"rate_stderr", "target_exponent", "monotone_trend", "split_consistent"}


def test_stochastic_part_scales_with_sigma():
    n_grid = [256, 512, 1024, 2048]
    small = risk_study(_config(sigma=0.25, n_grid=n_grid)).rows
    large = risk_study(_config(sigma=0.5, n_grid=n_grid)).rows
    ratio = large["mean_stochastic_part"] / small["mean_stochastic_part"]

    assert ratio.between(1.6, 2.4).all()


def test_rate_fit_of_an_exact_power_law():
    n = np.array([256, 512, 1024, 2048, 4096])
    rows = pd.DataFrame(dict(n=n, mean_sup_error=(np.log(n) / n) ** 0.4))
    rate = rate_fit(rows)

    assert rate.exponent == pytest.approx(0.4, abs=1e-12)
    assert rate.intercept == pytest.approx(0.0, abs=1e-10)


def test_rate_fit_with_multiplicative_noise():
    n = 2 ** np.arange(8, 21)
    noise = 1.0 + 0.05 * np.random.default_rng(0).uniform(-1.0, 1.0, n.size)
    rate = rate_fit([dict(n=int(k), mean_sup_error=float(v)) for k, v in zip(n, noise * (np.log(n) / n) ** 0.4)])

    assert abs(rate.exponent - 0.4) <= 0.02


def test_rate_fit_needs_four_rows():
    with pytest.raises(InsufficientDataError):
        rate_fit(pd.DataFrame(dict(n=[256, 512, 1024], mean_sup_error=[0.1, 0.08, 0.06])))


def test_scaling_fit():
    scale = np.array([1.0, 2.0, 4.0])
    exact = scaling_fit(3.0 * scale, scale)

    assert exact.constant == pytest.approx(3.0)
    assert exact.r_squared == pytest.approx(1.0)
    assert exact.ratio_max_min == pytest.approx(1.0)


def test_compare_truth_rates():
    results = {
        "quadratic": risk_study(_config()),
        "affine": risk_study(_config(truth="affine"))
    }
    table = compare_truth_rates(results)

    assert list(table["truth"]) == ["quadratic", "affine", "max"]
    assert table["target_exponent"].eq(0.4).all()


def test_bias_shape_is_bounded():
    table = bias_study(lambda t: t ** 2, [4, 8, 16, 32], M_n=64, r=2.0)

    assert list(table["n"]) == [256, 512, 1024, 2048]
    assert table["scaled_bias"].max() / table["scaled_bias"].min() <= 3.0
    assert (table["bias"] >= 0.0).all()


def test_bias_constants_over_truths_and_penalties(tmp_path):
    K_list = [4, 8, 16, 32]
    factors = (0.0, 1.0, 4.0)
    quadratic = bias_study(lambda t: t ** 2, K_list, M_n=64, r=2.0, L=2.0, lambda_factors=factors)
    exponential = bias_study(np.exp, K_list, M_n=64, r=2.0, L=math.e, lambda_factors=factors)

    assert len(quadratic) == len(K_list) * len(factors)
    assert quadratic["lam"].to_numpy() == pytest.approx([c / K for K in K_list for c in factors])

    for table in (quadratic, exponential, [quadratic, exponential]):
        constants = bias_constants_fit(table)
        assert constants.C1 > 0.0
        assert math.isfinite(constants.C2)
        assert constants.residual >= 0.0
        assert 0.5 < constants.r_squared <= 1.0

    assert bias_constants_fit([quadratic, exponential]).num_rows == 24

    csv_path, json_path = save_bias_study(pd.concat([quadratic, exponential], ignore_index=True), str(tmp_path))
    with open(json_path) as json_file:
        summary = json.load(json_file)
    assert {"C1", "C2", "residual", "r_squared"} <= set(summary)
    assert len(pd.read_csv(csv_path)) == 24


def test_bias_constants_need_varied_penalties():
    table = bias_study(lambda t: t ** 2, [4, 8, 16], M_n=32, r=2.0, L=2.0)

    with pytest.raises(InsufficientDataError):
        bias_constants_fit(table)


@pytest.mark.slow
def test_stochastic_part_follows_its_scale():
    result = risk_study(_config(sigma=0.5, n_grid=[512, 1024, 2048, 4096, 8192], replicates=100))
    rows = result.rows
    scale = np.sqrt(rows["K_n"] * np.log(rows["n"]) / rows["n"])
    fit_ = scaling_fit(rows["mean_stochastic_part"], scale)

    assert fit_.ratio_max_min <= 3.0
    assert fit_.r_squared >= 0.9


@pytest.mark.slow
def test_rate_reproduction():
    n_grid = [256, 512, 1024, 2048, 4096, 8192, 16384]
    result = risk_study(_config(n_grid=n_grid, replicates=100), threads=4)

    assert 0.30 <= result.rate_exponent <= 0.50
    assert result.strictly_decreasing


def test_error_splits_into_stochastic_part_and_bias():
    truth = make_truth("exponential")
    n, K_n = 192, 4
    system = build_design(build_knots(K_n), n, lambda_star=0.0)
    system = system.with_lambda_star(system.beta_n / K_n)
    reference = noise_free_fit(truth, n, K_n)
    bias = sup_norm_error(reference, truth, 2000)

    for replicate in range(20):
        _, y = generate_data(truth, n, 0.5, base_seed=3, replicate=replicate)
        result = fit_design(system, y)

        assert sup_norm_error(result, truth, 2000) <= sup_norm_error(result, reference, 2000) + bias + 1e-12
