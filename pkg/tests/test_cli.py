import json
import os

import numpy as np
import pandas as pd
import pytest

from convexpspline.cli import main
from convexpspline.qp.active_set import ActiveSetSolver

EXAMPLE_CONFIG = os.path.join(os.path.dirname(__file__), os.pardir, "configs", "risk_study_example.yaml")


def _write_sample(path, n=256, seed=0):
    x = np.arange(1, n + 1) / n
    y = x ** 2 + 0.1 * np.random.default_rng(seed).standard_normal(n)
    pd.DataFrame(dict(x=x, y=y)).to_csv(path, index=False)


def _read_json(path):
    with open(path) as json_file:
        return json.load(json_file)


def _write_config(path, **overrides):
    lines = dict(truth="quadratic", r="2.0", L="1.0", sigma="0.1", n_grid="[64, 128, 256, 512]", replicates="30",
                 base_seed="3")
    lines.update(overrides)
    path.write_text("".join(f"{key}: {value}\n" for key, value in lines.items() if value is not None))


def test_fit_records_the_tuning_rule(tmp_path):
    _write_sample(tmp_path / "data.csv")
    out = str(tmp_path / "fit.json")

    assert main(["fit", str(tmp_path / "data.csv"), "--r", "2", "--out-json", out, "--predict-grid", "101"]) == 0

    payload = _read_json(out)
    assert payload["K_n"] == 3
    assert payload["parameters"]["r"] == 2.0
    assert payload["diagnostics"]["certified"]
    predictions = pd.read_csv(tmp_path / "fit_predict.csv")
    assert len(predictions) == 101
    assert list(predictions.columns) == ["x", "fitted"]


def test_fit_overrides(tmp_path):
    _write_sample(tmp_path / "data.csv")
    out = str(tmp_path / "fit.json")

    assert main(["fit", str(tmp_path / "data.csv"), "--kn", "8", "--lambda-star", "0", "--out-json", out]) == 0

    payload = _read_json(out)
    assert payload["K_n"] == 8
    assert payload["lambda_star"] == 0.0
    assert payload["parameters"]["K_n"] == 8


def test_fit_input_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    bad = tmp_path / "bad.csv"
    bad.write_text("0.5,1.0\n0.7,oops\n")

    assert main(["fit", str(empty), "--out-json", str(tmp_path / "a.json")]) == 2
    assert main(["fit", str(bad), "--out-json", str(tmp_path / "b.json")]) == 2
    assert main(["fit", str(tmp_path / "missing.csv"), "--out-json", str(tmp_path / "c.json")]) == 2


def test_fit_solver_failure_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(ActiveSetSolver, "max_iterations", staticmethod(lambda K_n: -1))
    _write_sample(tmp_path / "data.csv")

    assert main(["fit", str(tmp_path / "data.csv"), "--out-json", str(tmp_path / "fit.json")]) == 3


def test_verify_family(tmp_path):
    out = str(tmp_path / "family.json")

    assert main(["verify-family", "--r", "2", "--L", "1", "--c0", "0.0625", "--n", "1000000", "--sigma", "1",
                 "--out-json", out]) == 0

    report = _read_json(out)
    assert report["passed"]
    assert report["separation"]["expected"] == pytest.approx(
        report["parameters"]["L_bar"] * report["parameters"]["K_n"] ** -2.0
    )


def test_verify_family_rejects_large_c0(tmp_path):
    assert main(["verify-family", "--r", "2", "--c0", "0.2", "--n", "1000000",
                 "--out-json", str(tmp_path / "family.json")]) == 2


def test_family_export(tmp_path):
    assert main(["family", "--r", "1.5", "--n", "1000000", "--out-csv", str(tmp_path / "family.csv"),
                 "--out-json", str(tmp_path / "family.json")]) == 0

    assert sorted(pd.read_csv(tmp_path / "family.csv")["j"].unique()) == [0, 1, 2, 3, 4]
    assert _read_json(tmp_path / "family.json")["parameters"]["M_n"] == 4


def test_structure_scan(tmp_path):
    assert main(["scan-structure", "--kn", "4,6", "--mn", "16", "--out-csv", str(tmp_path / "rows.csv"),
                 "--out-json", str(tmp_path / "summary.json")]) == 0

    summary = _read_json(tmp_path / "summary.json")
    assert summary["violations"] == 0
    assert summary["num_rows"] == 8 + 32


def test_lipschitz_scan(tmp_path):
    assert main(["scan-lipschitz", "--kn", "6,8", "--mn", "16", "--pairs", "10", "--threads", "2",
                 "--out-csv", str(tmp_path / "cells.csv"), "--out-json", str(tmp_path / "summary.json")]) == 0

    summary = _read_json(tmp_path / "summary.json")
    assert set(summary["max_lipschitz_norm_by_K_n"]) == {"6", "8"}
    assert all(entry["below_scan_max"] for entry in summary["pair_ratios"])


def test_risk_study_and_rate_fit(tmp_path):
    out_dir = tmp_path / "study"

    assert main(["risk-study", "--config", EXAMPLE_CONFIG, "--out-dir", str(out_dir)]) == 0

    summary = _read_json(out_dir / "risk_summary.json")
    assert "rate_exponent" in summary
    assert summary["parameters"]["truth"] == "quadratic"

    assert main(["rate-fit", str(out_dir / "risk_table.csv"), "--r", "2", "--out-json", str(tmp_path / "rate.json")]) == 0
    rate = _read_json(tmp_path / "rate.json")
    assert rate["exponent"] == pytest.approx(summary["rate_exponent"])
    assert rate["target_exponent"] == pytest.approx(0.4)


def test_risk_study_outputs_do_not_depend_on_threads(tmp_path):
    config = tmp_path / "study.yaml"
    _write_config(config)

    assert main(["risk-study", "--config", str(config), "--out-dir", str(tmp_path / "one"), "--threads", "1"]) == 0
    assert main(["risk-study", "--config", str(config), "--out-dir", str(tmp_path / "eight"), "--threads", "8"]) == 0

    for name in ("risk_table.csv", "risk_summary.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "eight" / name).read_bytes()


def test_risk_study_seed_override(tmp_path):
    config = tmp_path / "study.yaml"
    _write_config(config)

    assert main(["risk-study", "--config", str(config), "--out-dir", str(tmp_path / "out"), "--seed", "99"]) == 0
    assert _read_json(tmp_path / "out" / "risk_summary.json")["parameters"]["base_seed"] == 99


def test_missing_config_key_exit_code(tmp_path, caplog):
    config = tmp_path / "study.yaml"
    _write_config(config, sigma=None)

    assert main(["risk-study", "--config", str(config), "--out-dir", str(tmp_path / "out")]) == 2
    assert "sigma" in caplog.text


def test_invalid_study_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(ActiveSetSolver, "max_iterations", staticmethod(lambda K_n: -1))
    config = tmp_path / "study.yaml"
    _write_config(config)

    assert main(["risk-study", "--config", str(config), "--out-dir", str(tmp_path / "out")]) == 4


def _uncertified_solve(self, problem):
    return self._build_solution(problem, np.zeros(problem.K_n + 1), (), iterations=0)


def test_uncertified_fit_exit_code(tmp_path, monkeypatch, caplog):
    monkeypatch.setattr(ActiveSetSolver, "solve", _uncertified_solve)
    _write_sample(tmp_path / "data.csv")

    assert main(["fit", str(tmp_path / "data.csv"), "--out-json", str(tmp_path / "fit.json")]) == 3
    assert "stationarity" in caplog.text
    assert not (tmp_path / "fit.json").exists()
