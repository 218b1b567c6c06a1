"""Tests for the random baseline, the oracle search and the rate-curve runner."""

import csv
import io
import math
import unittest
from unittest import mock

import numpy as np
import pytest

from uniquant.core.measure import DiscreteMeasure, GeneratorSpec, parse_generator_spec, point_mass, synth
from uniquant.core.quantization import quantize
from uniquant.core.transport import wasserstein
from uniquant.errors import CertificateViolation, InvalidParameter, ProblemTooLarge
from uniquant.experiments import (
    RateCurveRow,
    RateExperimentConfig,
    brute_force_optimal_uniform,
    fit_slope,
    optimal_uniform_search,
    random_empirical_error,
    run_rate_experiment,
)
from uniquant.experiments.oracle import candidate_grid
from uniquant.experiments.rate_curve import CSV_COLUMNS


class TestFitSlope(unittest.TestCase):
    def test_power_law(self) -> None:
        ns = [2**k for k in range(1, 11)]
        fit = fit_slope(ns, [3.0 * n**-0.5 for n in ns])
        assert fit is not None
        assert fit.slope == pytest.approx(-0.5)
        assert fit.intercept == pytest.approx(math.log(3.0))
        assert fit.points == 5

    def test_too_few_points(self) -> None:
        assert fit_slope([4], [1.0]) is None
        assert fit_slope([4, 8, 16, 32], [1.0, 1.0, None, 0.0]) is None

    def test_unsorted_grid(self) -> None:
        fit = fit_slope([16, 2, 8, 4], [0.25, 2.0, 0.5, 1.0])
        assert fit is not None
        assert fit.slope == pytest.approx(-1.0)


class TestRandomBaseline(unittest.TestCase):
    def test_point_mass(self) -> None:
        baseline = random_empirical_error(point_mass([0.0, 0.0]), 5, 1.0, 4, seed=0)
        assert baseline.mean == 0.0
        assert baseline.std == 0.0
        assert baseline.trials == 4

    def test_deterministic(self) -> None:
        rho = synth(GeneratorSpec(kind="grid", d=2, m=6))
        a = random_empirical_error(rho, 8, 2.0, 5, seed=3)
        b = random_empirical_error(rho, 8, 2.0, 5, seed=3)
        assert a.errors == b.errors
        assert a.mean > 0
        assert a.to_dict()["trials"] == 5

    def test_invalid(self) -> None:
        with pytest.raises(InvalidParameter):
            random_empirical_error(point_mass([0.0]), 4, 1.0, 0, seed=0)


class TestOracle(unittest.TestCase):
    def test_candidate_grid(self) -> None:
        grid = candidate_grid(1.0, 2, 1.0)
        assert grid.shape == (9, 2)
        assert candidate_grid(0.0, 3, 0.1).shape == (1, 3)
        with pytest.raises(InvalidParameter):
            candidate_grid(1.0, 1, 0.0)
        with pytest.raises(ProblemTooLarge):
            candidate_grid(1.0, 3, 1e-2)

    def test_point_mass(self) -> None:
        assert brute_force_optimal_uniform(point_mass([0.0]), 3, 1.0, 0.1) == 0.0

    def test_two_dirac(self) -> None:
        rho = synth(parse_generator_spec("twodirac:gap=1"))
        result = optimal_uniform_search(rho, 2, 1.0, 1e-3)
        assert result.mode == "separable"
        assert result.value == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_array_equal(result.centers, [[-1.0], [1.0]])
        assert brute_force_optimal_uniform(rho, 3, 1.0, 1e-3) > 0

    def test_two_dirac_odd_n(self) -> None:
        rho = synth(parse_generator_spec("twodirac:gap=1"))
        for n in (3, 5, 9):
            assert brute_force_optimal_uniform(rho, n, 2.0, 1e-3) == pytest.approx(n**-0.5, abs=1e-9)

    def test_never_worse_than_the_quantizer(self) -> None:
        rho = DiscreteMeasure([[-0.9], [-0.1], [0.35], [0.8]], [0.1, 0.4, 0.3, 0.2])
        for n in (2, 3, 5):
            quantizer = quantize(rho, n)
            measured = wasserstein(quantizer.empirical_measure(), rho, 1.0)
            oracle = brute_force_optimal_uniform(rho, n, 1.0, 0.5, extra_candidates=quantizer.centers)
            assert oracle <= measured + 1e-12

    def test_exhaustive_and_descent(self) -> None:
        rho = synth(GeneratorSpec(kind="grid", d=2, m=2))
        exhaustive = optimal_uniform_search(rho, 4, 1.0, 1.0, mode="exhaustive")
        descent = optimal_uniform_search(rho, 4, 1.0, 1.0, mode="descent")
        assert exhaustive.evaluations == math.comb(12, 4)
        assert exhaustive.value == pytest.approx(0.0, abs=1e-12)
        assert descent.value == pytest.approx(0.0, abs=1e-12)
        assert optimal_uniform_search(rho, 4, 1.0, 1.0).mode == "exhaustive"

    def test_mode_errors(self) -> None:
        rho = synth(GeneratorSpec(kind="grid", d=2, m=2))
        with pytest.raises(InvalidParameter):
            optimal_uniform_search(rho, 2, 1.0, 1.0, mode="separable")
        with pytest.raises(ProblemTooLarge):
            optimal_uniform_search(rho, 7, 1.0, 1.0, mode="exhaustive")


class TestRateCurveRow(unittest.TestCase):
    def test_sandwich(self) -> None:
        row = RateCurveRow(n=4, measured=0.1, coupling_cost=0.2, coupling_bound=0.3, closed_form_bound=0.4)
        assert row.satisfies_sandwich()
        assert row.to_csv_row() == [4, "0.1", "0.3", "0.4", "", ""]

    def test_violations(self) -> None:
        row = RateCurveRow(
            n=4, measured=0.25, coupling_cost=0.2, coupling_bound=0.3, closed_form_bound=0.4, oracle_optimal=0.3
        )
        problems = row.sandwich_violations()
        assert len(problems) == 2
        assert problems[0].startswith("n=4: oracle_optimal")


class TestRunRateExperiment(unittest.TestCase):
    def test_small_grid(self) -> None:
        config = RateExperimentConfig(
            measure=synth(GeneratorSpec(kind="grid", d=2, m=6)),
            label="grid:d=2,m=6,r=1",
            p=1.0,
            n_grid=[8, 2, 4, 4],
            random_baseline=True,
            trials=3,
        )
        curve = run_rate_experiment(config)
        assert [row.n for row in curve.rows] == [2, 4, 8]
        assert curve.violations() == []
        reader = csv.reader(io.StringIO(curve.to_csv()))
        assert next(reader) == CSV_COLUMNS
        assert all(row[5] == "" for row in reader)
        assert set(curve.fits) == {"measured", "coupling_bound", "random_baseline"}
        assert curve.to_dict()["d"] == 2

    def test_parallel_rows_match_sequential(self) -> None:
        measure = synth(GeneratorSpec(kind="grid", d=2, m=8))
        grid = list(range(2, 14))
        sequential = run_rate_experiment(
            RateExperimentConfig(measure=measure, label="grid", p=2.0, n_grid=grid, random_baseline=True, trials=2)
        )
        parallel = run_rate_experiment(
            RateExperimentConfig(
                measure=measure, label="grid", p=2.0, n_grid=grid, random_baseline=True, trials=2, workers=4
            )
        )
        assert sequential.to_csv() == parallel.to_csv()
        assert sequential.to_json() == parallel.to_json()

    def test_strict_mode_raises(self) -> None:
        config = RateExperimentConfig(measure=point_mass([0.0]), label="delta", p=1.0, n_grid=[2])
        row = RateCurveRow(n=2, measured=1.0, coupling_cost=0.0, coupling_bound=0.0, closed_form_bound=0.0)
        with mock.patch("uniquant.experiments.rate_curve.evaluate_row", return_value=row):
            with pytest.raises(CertificateViolation):
                run_rate_experiment(config)
            assert run_rate_experiment(config, strict=False).violations()

    def test_invalid_config(self) -> None:
        measure = point_mass([0.0])
        with pytest.raises(InvalidParameter):
            RateExperimentConfig(measure=measure, label="delta", p=1.0, n_grid=[])
        with pytest.raises(InvalidParameter):
            RateExperimentConfig(measure=measure, label="delta", p=0.5, n_grid=[1])
        with pytest.raises(InvalidParameter):
            RateExperimentConfig(measure=measure, label="delta", p=1.0, n_grid=[0, 1])


@pytest.mark.slow
def test_grid_slope_follows_the_dimension() -> None:
    config = RateExperimentConfig(
        measure=synth(parse_generator_spec("grid:d=2,m=50,r=1")),
        label="grid:d=2,m=50,r=1",
        p=1.0,
        n_grid=list(range(4, 101)),
    )
    fit = run_rate_experiment(config).fits["measured"]
    assert fit is not None
    assert -0.62 <= fit.slope <= -0.38


@pytest.mark.slow
def test_two_dirac_oracle_slope_follows_the_order() -> None:
    config = RateExperimentConfig(
        measure=synth(parse_generator_spec("twodirac:gap=1")),
        label="twodirac:gap=1",
        p=2.0,
        n_grid=list(range(3, 42, 2)),
        oracle=True,
    )
    curve = run_rate_experiment(config)
    fit = curve.fits["oracle_optimal"]
    assert fit is not None
    assert -0.62 <= fit.slope <= -0.38
    for row in curve.rows:
        assert row.oracle_optimal == pytest.approx(row.n**-0.5, abs=1e-9)
