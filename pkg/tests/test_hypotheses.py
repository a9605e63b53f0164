import itertools
import math

import numpy as np
import pandas as pd
import pytest

from convexpspline.hypotheses import (
    FamilyParams,
    PiecewisePolyFn,
    build_family,
    c3_threshold,
    closed_form_integral,
    convexity_check,
    export_family_csv,
    family_for_sample_size,
    kl_bound,
    mean_kl_divergence,
    quadrature_integral,
    separation,
    separation_location,
    theorem_scale,
    verify_family,
    verify_holder
)
from convexpspline.utils.exceptions import FamilyTooSmallError, InvalidArgumentError


def test_piecewise_evaluation_uses_local_coordinates():
    fn = PiecewisePolyFn([0.0, 0.5, 1.0], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.25]])

    assert fn(0.25) == pytest.approx(0.0625)
    assert fn(0.75) == pytest.approx(0.5)
    assert fn.is_continuous()
    assert np.allclose(fn(np.array([0.0, 1.0])), [0.0, 0.75])


def test_sup_norm_finds_interior_vertex():
    fn = PiecewisePolyFn([0.0, 1.0], [[1.0, -1.0, 0.0]])
    sup = fn.sup_norm()

    assert sup.value == pytest.approx(0.25)
    assert sup.location == pytest.approx(0.5)


def test_antiderivative_of_piecewise_linear():
    ramp = PiecewisePolyFn.linear_interpolant([0.0, 0.5, 1.0], [0.0, 1.0, 1.0])
    integral = ramp.antiderivative()

    assert integral(0.5) == pytest.approx(0.25)
    assert integral(1.0) == pytest.approx(0.75)
    assert integral.is_continuous()
    assert np.allclose(integral.derivative()(np.linspace(0, 1, 11)), ramp(np.linspace(0, 1, 11)))
    with pytest.raises(InvalidArgumentError):
        integral.antiderivative()


def test_difference_on_merged_breakpoints():
    first = PiecewisePolyFn.linear_interpolant([0.0, 0.3, 1.0], [0.0, 0.3, 1.0])
    second = PiecewisePolyFn.linear_interpolant([0.0, 0.6, 1.0], [0.0, 0.0, 0.4])
    difference = first - second
    points = np.linspace(0.0, 1.0, 21)

    assert np.allclose(difference.breakpoints, [0.0, 0.3, 0.6, 1.0])
    assert np.allclose(difference(points), first(points) - second(points))


def test_invalid_piecewise_definitions():
    with pytest.raises(InvalidArgumentError):
        PiecewisePolyFn([0.0, 0.0, 1.0], [[0, 0, 0], [0, 0, 0]])
    with pytest.raises(InvalidArgumentError):
        PiecewisePolyFn([0.0, 1.0], [[0, 0, 0], [0, 0, 0]])


def test_theorem_scale():
    assert theorem_scale(10 ** 6, 2.0) == pytest.approx(4.0 * (1e6 / math.log(1e6)) ** 0.2)
    assert theorem_scale(10 ** 6, 1.5) == pytest.approx((1e6 / math.log(1e6)) ** 0.25)


@pytest.mark.parametrize("r, M_n", [(1.3, 2), (1.5, 4), (2.0, 9)])
def test_family_sizes_at_one_million(r, M_n):
    family = family_for_sample_size(10 ** 6, r, 1.0, 1.0 / 16.0)

    assert family.M_n == M_n
    assert len(family) == M_n + 1


@pytest.mark.parametrize("r", [1.3, 1.5, 2.0])
def test_members_are_convex_holder_and_separated(r):
    family = family_for_sample_size(10 ** 6, r, 1.0, 1.0 / 16.0)
    expected = family.params.L_bar * family.params.K_n ** (-r)

    for member in family:
        assert convexity_check(member)
        assert member(0.0) == 0.0
        assert verify_holder(member, r, 1.0, grid_size=512).max_ratio <= 1.0 + 1e-9

    for j, k in itertools.combinations(range(len(family)), 2):
        assert separation(family, j, k) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("r", [1.3, 1.5, 2.0])
def test_mean_divergence_meets_the_bound(r):
    family = family_for_sample_size(10 ** 6, r, 1.0, 1.0 / 16.0)
    mean_kl = mean_kl_divergence(family, 10 ** 6)

    assert mean_kl <= kl_bound(family.params, 10 ** 6)
    assert mean_kl <= family.params.c0 * math.log(family.M_n)


@pytest.mark.parametrize("r", [1.3, 1.5, 2.0])
def test_integral_closed_form(r):
    family = family_for_sample_size(10 ** 6, r, 1.0, 1.0 / 16.0)

    assert quadrature_integral(family) == pytest.approx(closed_form_integral(family.params), rel=1e-8)


@pytest.mark.parametrize("r", [1.3, 1.5, 2.0])
def test_family_verification_report(r):
    report = verify_family(r, 1.0, 1.0 / 16.0, 10 ** 6, sigma=1.0)

    assert report["passed"]
    assert report["convexity_and_holder"]["max_holder_ratio"] <= 1.0 + 1e-9
    assert report["separation"]["expected"] == pytest.approx(report["parameters"]["L_bar"] * report["parameters"]["K_n"] ** -r)
    assert report["kullback_leibler"]["mean_kl"] <= report["kullback_leibler"]["c0_log_M_n"]


def test_parameter_ranges():
    with pytest.raises(InvalidArgumentError):
        FamilyParams.from_sigma(r=2.0, L=1.0, c0=0.2, K_n=40.0)
    with pytest.raises(InvalidArgumentError):
        FamilyParams.from_sigma(r=2.5, L=1.0, c0=0.05, K_n=40.0)
    with pytest.raises(InvalidArgumentError):
        FamilyParams.from_sigma(r=1.5, L=1.0, c0=0.05, K_n=9.0)


def test_small_family_is_rejected():
    with pytest.raises(FamilyTooSmallError):
        build_family(FamilyParams.from_sigma(r=2.0, L=1.0, c0=0.05, K_n=6.0))


def test_c3_threshold_is_reached_on_the_doubling_grid():
    threshold = c3_threshold(2.0, 1.0, 1.0 / 16.0)

    assert threshold is not None
    assert threshold["M_n"] >= 2
    assert threshold["kl_bound"] <= threshold["c0_log_M_n"]


def test_export_family_csv(tmp_path):
    family = family_for_sample_size(10 ** 6, 2.0, 1.0, 1.0 / 16.0)
    path = str(tmp_path / "family.csv")
    table = export_family_csv(family, path)
    written = pd.read_csv(path)

    assert list(written.columns) == ["j", "breakpoint", "quad_coef_a", "lin_coef_b", "const_c"]
    assert len(written) == len(table) == sum(len(member) for member in family)
    assert sorted(written["j"].unique()) == list(range(family.M_n + 1))


@pytest.mark.parametrize("r", [1.3, 1.5])
def test_separation_is_reached_inside_the_later_block(r):
    family = family_for_sample_size(10 ** 6, r, 1.0, 1.0 / 16.0)
    params = family.params

    for j, k in itertools.permutations(range(len(family)), 2):
        location = separation_location(family, j, k)
        expected = (max(j, k) - 1) * params.K_n ** (-params.gamma) + 2.0 / params.K_n

        assert location == pytest.approx(expected, rel=1e-10)
        assert abs(family[j](location) - family[k](location)) == pytest.approx(separation(family, j, k), rel=1e-10)

    with pytest.raises(InvalidArgumentError):
        separation_location(family, 1, 1)


def test_separation_location_of_the_lipschitz_case_uses_wider_blocks():
    family = family_for_sample_size(10 ** 6, 2.0, 1.0, 1.0 / 16.0)
    K_n = family.params.K_n

    assert separation_location(family, 0, 2) == pytest.approx(4.0 / K_n + 2.0 / K_n, rel=1e-10)


def test_windowed_sup_norm():
    function = PiecewisePolyFn([0.0, 0.25, 0.5, 1.0], [[0.0, 4.0, 0.0], [0.0, -4.0, 1.0], [0.0, 3.0, 0.0]])

    assert function.sup_norm() == (1.5, 1.0)
    assert function.sup_norm(0.0, 0.5) == (1.0, 0.25)
    assert function.sup_norm(0.25, 0.5) == (1.0, 0.25)
