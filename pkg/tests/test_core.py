import math

import numpy as np
import pytest

from TransportToolkit.Core import (CostMatrix, TransportPlan, EntropicProblem, SimplexVector, validate_simplex,
                                   entropy, transport_cost, entropic_objective, marginal_residual,
                                   independent_coupling, derive_params, smooth_marginals, build_entropic_problem)
from TransportToolkit.Core.Errors import (NegativeEntry, SumNotOne, ShapeMismatch, TooSmallProblem, ZeroCost,
                                          BadEpsPrime, TransportToolkitError)

from conftest import random_simplex


class TestSimplexValidation:
    def test_uniform_is_valid(self):
        vector = validate_simplex([0.5, 0.5])
        assert vector.n == 2
        np.testing.assert_array_equal(vector.values, [0.5, 0.5])

    def test_sum_off_by_more_than_tolerance(self):
        with pytest.raises(SumNotOne):
            validate_simplex([0.3, 0.7000000002])

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry):
            validate_simplex([-0.1, 1.1])

    def test_errors_share_a_base(self):
        with pytest.raises(TransportToolkitError):
            validate_simplex([0.2, 0.2])

    def test_values_are_read_only(self):
        vector = validate_simplex([0.25, 0.75])
        with pytest.raises(ValueError):
            vector.values[0] = 1.0


class TestTypes:
    def test_cost_matrix_caches_max(self):
        assert CostMatrix([[0.0, 3.0], [2.0, 1.0]]).max_abs == 3.0

    def test_cost_matrix_must_be_square(self):
        with pytest.raises(ShapeMismatch):
            CostMatrix(np.ones((2, 3)))

    def test_plan_mass_above_one_rejected(self):
        with pytest.raises(ValueError):
            TransportPlan(np.full((2, 2), 0.5))

    def test_problem_needs_positive_marginals(self, swap_cost):
        with pytest.raises(ValueError):
            EntropicProblem(swap_cost, SimplexVector([1.0, 0.0]), SimplexVector([0.5, 0.5]), eta=1.0)

    def test_problem_needs_positive_eta(self, swap_cost):
        with pytest.raises(ValueError):
            EntropicProblem(swap_cost, SimplexVector([0.5, 0.5]), SimplexVector([0.5, 0.5]), eta=0.0)


class TestEntropy:
    def test_uniform_plan(self):
        assert entropy(TransportPlan(np.full((2, 2), 0.25))) == pytest.approx(math.log(4), abs=1e-12)

    def test_point_mass(self):
        assert entropy(TransportPlan([[1.0, 0.0], [0.0, 0.0]])) == 0.0

    def test_single_row(self):
        assert entropy(TransportPlan([[0.5, 0.5]])) == pytest.approx(math.log(2), abs=1e-12)

    def test_uniform_is_maximal(self, rng):
        n = 3
        for _ in range(200):
            plan = TransportPlan(rng.dirichlet(np.ones(n * n)).reshape(n, n) * (1.0 - 1e-15))
            assert entropy(plan) <= 2.0 * math.log(n) + 1e-9


class TestTransportCost:
    def test_zero_cost_support(self, swap_cost):
        assert transport_cost(swap_cost, TransportPlan(np.diag([0.5, 0.5]))) == 0.0

    def test_constant_cost(self, rng):
        plan = TransportPlan(rng.dirichlet(np.ones(9)).reshape(3, 3) * (1.0 - 1e-15))
        assert transport_cost(CostMatrix(np.ones((3, 3))), plan) == pytest.approx(1.0, abs=1e-12)

    def test_direct_summation(self, swap_cost):
        assert transport_cost(swap_cost, TransportPlan([[0.3, 0.0], [0.2, 0.5]])) == pytest.approx(0.2, abs=1e-15)

    def test_shape_mismatch(self, swap_cost):
        with pytest.raises(ShapeMismatch):
            transport_cost(swap_cost, TransportPlan(np.full((3, 3), 0.1)))

    def test_linearity(self, rng):
        for _ in range(100):
            cost = CostMatrix(rng.uniform(0, 5, size=(4, 4)))
            x, y = rng.uniform(0, 1, size=(2, 4, 4))
            a, b = rng.uniform(-2, 2, size=2)
            combined = transport_cost(cost, a * x + b * y)
            assert combined == pytest.approx(a * transport_cost(cost, x) + b * transport_cost(cost, y), abs=1e-12)


class TestMarginalResidual:
    def test_feasible_plan(self):
        p, q = SimplexVector([0.3, 0.7]), SimplexVector([0.5, 0.5])
        assert marginal_residual(independent_coupling(p, q), p, q) <= 1e-12

    def test_zero_plan(self):
        p, q = SimplexVector([0.3, 0.7]), SimplexVector([0.1, 0.9])
        assert marginal_residual(TransportPlan(np.zeros((2, 2))), p, q) == pytest.approx(2.0)

    def test_direct_evaluation(self):
        p = q = SimplexVector([0.5, 0.5])
        assert marginal_residual(TransportPlan([[0.5, 0.0], [0.0, 0.3]]), p, q) == pytest.approx(0.4)

    def test_shape_mismatch(self):
        p = SimplexVector([0.5, 0.5])
        with pytest.raises(ShapeMismatch):
            marginal_residual(TransportPlan(np.full((3, 3), 0.1)), p, p)


class TestEntropicObjective:
    def test_uniform_plan(self, swap_cost):
        plan = TransportPlan(np.full((2, 2), 0.25))
        assert entropic_objective(swap_cost, plan, 0.5) == pytest.approx(0.5 - 0.5 * math.log(4))


class TestDeriveParams:
    def test_formula(self):
        params = derive_params(0.4, CostMatrix([[0.0, 2.0], [2.0, 0.0]]), 4)
        assert params.eta == pytest.approx(0.4 / (4 * math.log(4)))
        assert params.eta == pytest.approx(0.0721348, abs=1e-7)
        assert params.eps_prime == pytest.approx(0.025)

    def test_eps_prime_boundary(self, swap_cost):
        assert derive_params(8.0, swap_cost, 5).eps_prime == pytest.approx(1.0)

    def test_too_small(self, swap_cost):
        with pytest.raises(TooSmallProblem):
            derive_params(0.1, swap_cost, 1)

    def test_zero_cost(self):
        with pytest.raises(ZeroCost):
            derive_params(0.1, CostMatrix(np.zeros((2, 2))), 2)

    def test_nonpositive_eps(self, swap_cost):
        with pytest.raises(ValueError):
            derive_params(0.0, swap_cost, 2)


class TestSmoothMarginals:
    def test_formula(self):
        p_smooth, _ = smooth_marginals(SimplexVector([1.0, 0.0]), SimplexVector([0.5, 0.5]), 0.2)
        np.testing.assert_allclose(p_smooth.values, [0.9875, 0.0125], atol=1e-15)

    def test_uniform_is_fixed(self):
        uniform = SimplexVector(np.full(4, 0.25))
        p_smooth, q_smooth = smooth_marginals(uniform, uniform, 0.3)
        np.testing.assert_allclose(p_smooth.values, uniform.values, atol=1e-15)
        np.testing.assert_allclose(q_smooth.values, uniform.values, atol=1e-15)

    def test_floor_reached_on_zero_entry(self):
        eps_prime = 0.4
        p_smooth, _ = smooth_marginals(SimplexVector([0.0, 0.6, 0.4]), SimplexVector(np.full(3, 1 / 3)), eps_prime)
        assert p_smooth.values.min() == pytest.approx(eps_prime / 24, abs=1e-15)

    def test_bad_eps_prime(self):
        uniform = SimplexVector([0.5, 0.5])
        with pytest.raises(BadEpsPrime):
            smooth_marginals(uniform, uniform, 0.0)
        with pytest.raises(BadEpsPrime):
            smooth_marginals(uniform, uniform, 8.0)

    def test_random_inputs(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 10))
            p, q = random_simplex(rng, n), random_simplex(rng, n)
            eps_prime = float(rng.uniform(1e-4, 1.0))
            p_smooth, q_smooth = smooth_marginals(p, q, eps_prime)
            for vector in (p_smooth, q_smooth):
                assert abs(vector.values.sum() - 1.0) <= 1e-12
                assert vector.values.min() > 0
            p_shift = np.abs(p.values - p_smooth.values).sum()
            q_shift = np.abs(q.values - q_smooth.values).sum()
            assert p_shift <= eps_prime / 4 + 1e-12 and q_shift <= eps_prime / 4 + 1e-12
            assert p_shift + q_shift <= eps_prime / 2 + 1e-12


class TestBuildEntropicProblem:
    def test_uses_smoothed_marginals(self, oracle_instance):
        cost, p, q = oracle_instance
        params = derive_params(0.1, cost, 2)
        prob = build_entropic_problem(cost, p, q, params)
        assert prob.eta == params.eta
        p_smooth, q_smooth = smooth_marginals(p, q, params.eps_prime)
        np.testing.assert_array_equal(prob.p, p_smooth.values)
        np.testing.assert_array_equal(prob.q, q_smooth.values)
        np.testing.assert_allclose(prob.scaled_cost, cost.entries / params.eta)
