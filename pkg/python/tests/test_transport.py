"""Tests for exact transport, the line solver and the canonical coupling."""

import itertools
import unittest

import numpy as np
import pytest

from uniquant.core.measure import DiscreteMeasure, GeneratorSpec, point_mass, synth
from uniquant.core.quantization import coupling_upper_bound, quantize
from uniquant.core.transport import (
    coupling_cost,
    exact_wasserstein,
    ground_cost,
    wasserstein,
    wasserstein_1d,
)
from uniquant.errors import EmptyMeasure, FormatError, InvalidParameter, ProblemTooLarge, UnbalancedMasses


def random_pair(rng: np.random.Generator, max_atoms: int = 4) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    d = int(rng.integers(1, 3))
    m, n = (int(k) for k in rng.integers(1, max_atoms + 1, size=2))
    mu = DiscreteMeasure(rng.normal(size=(m, d)), rng.dirichlet(np.ones(m)))
    nu = DiscreteMeasure(rng.normal(size=(n, d)), rng.dirichlet(np.ones(n)))
    return mu, nu


def enumerate_vertices(a: np.ndarray, b: np.ndarray, cost: np.ndarray) -> float:
    """Minimum cost over the basic feasible solutions of the transportation polytope."""
    m, n = cost.shape
    rows = [np.kron(np.eye(m)[i], np.ones(n)) for i in range(m)]
    cols = [np.kron(np.ones(m), np.eye(n)[j]) for j in range(n)]
    # one marginal constraint is implied by the others
    constraints = np.array(rows + cols[:-1])
    rhs = np.concatenate([a, b[:-1]])
    size = m + n - 1
    subsets = np.array(list(itertools.combinations(range(m * n), size)))
    systems = constraints[:, subsets].transpose(1, 0, 2)
    regular = np.abs(np.linalg.det(systems)) > 1e-9
    solutions = np.linalg.solve(systems[regular], np.broadcast_to(rhs, (int(regular.sum()), size))[..., None])[..., 0]
    feasible = np.all(solutions >= -1e-12, axis=1)
    flat = cost.ravel()
    values = (solutions[feasible] * flat[subsets[regular][feasible]]).sum(axis=1)
    return float(values.min())


class TestExactWasserstein(unittest.TestCase):
    def test_two_dirac_shift(self) -> None:
        mu = DiscreteMeasure([[-1.0], [1.0]], [0.5, 0.5])
        nu = DiscreteMeasure([[-0.5], [0.0]], [0.5, 0.5])
        value, plan = exact_wasserstein(mu, nu, 1.0)
        assert value == pytest.approx(0.75, abs=1e-12)
        np.testing.assert_allclose(plan.dense(2, 2), [[0.5, 0.0], [0.0, 0.5]])
        assert max(plan.marginal_errors(mu, nu)) < 1e-12

    def test_point_masses(self) -> None:
        value, plan = exact_wasserstein(point_mass([0.0, 0.0]), point_mass([3.0, -4.0]), 2.0)
        assert value == pytest.approx(4.0)
        assert plan.to_dict()["entries"] == [{"i": 0, "j": 0, "m": 1.0}]

    def test_identical(self) -> None:
        mu = DiscreteMeasure([[0.0, 1.0], [2.0, 3.0]], [0.3, 0.7])
        assert exact_wasserstein(mu, mu, 3.0)[0] == pytest.approx(0.0, abs=1e-12)

    def test_zero_weight_atoms_are_skipped(self) -> None:
        mu = DiscreteMeasure([[100.0], [0.0]], [0.0, 1.0])
        value, plan = exact_wasserstein(mu, point_mass([1.0]), 1.0)
        assert value == pytest.approx(1.0)
        np.testing.assert_array_equal(plan.sources, [1])

    def test_errors(self) -> None:
        mu = point_mass([0.0])
        with pytest.raises(UnbalancedMasses):
            exact_wasserstein(mu, point_mass([1.0], 0.5), 1.0)
        with pytest.raises(FormatError):
            exact_wasserstein(mu, point_mass([0.0, 0.0]), 1.0)
        with pytest.raises(InvalidParameter):
            exact_wasserstein(mu, mu, 0.5)
        with pytest.raises(EmptyMeasure):
            exact_wasserstein(mu, DiscreteMeasure([[0.0]], [0.0]), 1.0)

    def test_normalize(self) -> None:
        value, _ = exact_wasserstein(point_mass([0.0]), point_mass([2.0], 0.5), 1.0, normalize=True)
        assert value == pytest.approx(2.0)

    def test_problem_too_large(self) -> None:
        big = DiscreteMeasure(np.arange(1001.0).reshape(-1, 1), np.full(1001, 1 / 1001))
        with pytest.raises(ProblemTooLarge):
            exact_wasserstein(big, big, 1.0)


def test_ground_cost_is_max_norm() -> None:
    cost = ground_cost(np.array([[0.0, 0.0]]), np.array([[1.0, -2.0], [0.5, 0.5]]), 2.0)
    np.testing.assert_array_equal(cost, [[4.0, 0.25]])


@pytest.mark.parametrize("seed", range(50))
def test_matches_vertex_enumeration(seed: int) -> None:
    rng = np.random.default_rng(seed)
    mu, nu = random_pair(rng)
    p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
    value, plan = exact_wasserstein(mu, nu, p)
    expected = enumerate_vertices(mu.weights, nu.weights, ground_cost(mu.points, nu.points, p))
    assert plan.cost == pytest.approx(expected, abs=1e-9)
    assert value == pytest.approx(expected ** (1 / p), abs=1e-9)


@pytest.mark.parametrize("seed", range(50))
def test_metric_axioms(seed: int) -> None:
    rng = np.random.default_rng(1000 + seed)
    d = int(rng.integers(1, 4))
    p = float(rng.choice([1.0, 2.0, 3.0]))
    mu, nu, eta = (
        DiscreteMeasure(rng.normal(size=(k, d)), rng.dirichlet(np.ones(k)))
        for k in rng.integers(1, 30, size=3)
    )
    forward = exact_wasserstein(mu, nu, p)[0]
    assert forward == pytest.approx(exact_wasserstein(nu, mu, p)[0], abs=1e-9)
    assert exact_wasserstein(mu, mu, p)[0] == pytest.approx(0.0, abs=1e-9)
    assert forward <= exact_wasserstein(mu, eta, p)[0] + exact_wasserstein(eta, nu, p)[0] + 1e-7


@pytest.mark.parametrize("seed", range(20))
def test_monotone_in_order(seed: int) -> None:
    rng = np.random.default_rng(2000 + seed)
    mu, nu = random_pair(rng, max_atoms=12)
    values = [exact_wasserstein(mu, nu, p)[0] for p in (1.0, 1.5, 2.0, 4.0)]
    assert all(a <= b + 1e-9 for a, b in itertools.pairwise(values))


class TestWasserstein1d(unittest.TestCase):
    def test_example(self) -> None:
        mu = DiscreteMeasure([[-1.0], [1.0]], [0.5, 0.5])
        nu = DiscreteMeasure([[0.0], [-0.5]], [0.5, 0.5])
        assert wasserstein_1d(mu, nu, 1.0) == pytest.approx(0.75)
        assert wasserstein_1d(mu, nu, 2.0) == pytest.approx(np.sqrt(0.625))

    def test_matches_network_simplex(self) -> None:
        for seed in range(30):
            rng = np.random.default_rng(3000 + seed)
            m, n = (int(k) for k in rng.integers(1, 60, size=2))
            mu = DiscreteMeasure(rng.normal(size=(m, 1)), rng.dirichlet(np.ones(m)))
            nu = DiscreteMeasure(np.round(rng.normal(size=(n, 1)), 1), rng.dirichlet(np.ones(n)))
            p = float(rng.choice([1.0, 2.0, 2.5]))
            assert wasserstein_1d(mu, nu, p) == pytest.approx(exact_wasserstein(mu, nu, p)[0], abs=1e-9)

    def test_needs_the_line(self) -> None:
        with pytest.raises(FormatError):
            wasserstein_1d(point_mass([0.0, 0.0]), point_mass([1.0, 1.0]), 1.0)

    def test_dispatch(self) -> None:
        mu = DiscreteMeasure([[0.0, 0.0], [1.0, 1.0]], [0.5, 0.5])
        assert wasserstein(mu, point_mass([0.0, 0.0]), 1.0) == pytest.approx(0.5)
        assert wasserstein(point_mass([1.0]), point_mass([3.0]), 2.0) == pytest.approx(2.0)


class TestCouplingCost(unittest.TestCase):
    def test_two_dirac(self) -> None:
        rho = DiscreteMeasure([[-1.0], [1.0]], [0.5, 0.5])
        quantizer = quantize(rho, 2)
        dec = quantizer.source_decomposition
        assert coupling_cost(dec, quantizer, 1.0) == pytest.approx(0.75)
        assert coupling_cost(dec, quantizer, 2.0) == pytest.approx(np.sqrt(0.625))

    def test_sandwich(self) -> None:
        rho = synth(GeneratorSpec(kind="grid", d=2, m=8))
        for n in (1, 3, 10, 16):
            quantizer = quantize(rho, n)
            dec = quantizer.source_decomposition
            for p in (1.0, 2.0):
                measured = wasserstein(quantizer.empirical_measure(), rho, p)
                coupled = coupling_cost(dec, quantizer, p)
                assert measured <= coupled + 1e-9
                assert coupled <= coupling_upper_bound(dec, p) + 1e-9
