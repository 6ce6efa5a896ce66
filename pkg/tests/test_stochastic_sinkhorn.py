import math

import numpy as np
import pytest

from TransportToolkit.Core import CostMatrix, EntropicProblem, SimplexVector, TransportPlan, marginal_residual
from TransportToolkit.Core.Errors import AllZero, DegenerateRow, DidNotConverge, IndexOutOfRange
from TransportToolkit.Solvers import (StochasticSinkhornSolver, kl_violation, increasing_probability,
                                      plan_from_scalings, stochastic_sinkhorn_step, stochastic_sinkhorn_solve,
                                      approximate_ot_stochastic)
from TransportToolkit.Utils.OpCounter import OpCounter

from conftest import random_problem, zero_cost_problem


class TestKLViolation:
    def test_exact_marginals_vanish(self):
        p, q = SimplexVector([0.3, 0.7]), SimplexVector([0.5, 0.5])
        rho = kl_violation(TransportPlan([[0.3, 0.0], [0.2, 0.5]]), p, q).rho
        np.testing.assert_allclose(rho, np.zeros(4), atol=1e-15)

    def test_scalar_formula(self):
        p, q = SimplexVector([0.3, 0.7]), SimplexVector([0.5, 0.5])
        rho = kl_violation(TransportPlan(np.full((2, 2), 0.25)), p, q).rho
        assert rho[0] == pytest.approx(0.3 * math.log(0.6) - 0.3 + 0.5, abs=1e-12)
        assert rho[0] == pytest.approx(0.04675, abs=1e-5)
        assert rho[2] == pytest.approx(0.0, abs=1e-15)

    def test_nonnegative(self, rng):
        for _ in range(200):
            prob = random_problem(4, seed=int(rng.integers(1 << 30)))
            rho = kl_violation(rng.uniform(0.01, 1.0, size=(4, 4)), prob.row_marginal, prob.col_marginal).rho
            assert rho.shape == (8,) and rho.min() >= 0

    def test_vanishes_with_residual(self):
        prob = random_problem(5, eta=0.5, seed=3)
        solver = StochasticSinkhornSolver(prob, tol=1e-10, seed=0, max_iters=20000)
        solver.run(warn=False)
        plan = plan_from_scalings(solver.scalings(), prob)
        assert marginal_residual(plan, prob.row_marginal, prob.col_marginal) <= 1e-8
        assert kl_violation(plan, prob.row_marginal, prob.col_marginal).rho.max() <= 1e-10

    def test_zero_row(self):
        half = SimplexVector([0.5, 0.5])
        with pytest.raises(DegenerateRow):
            kl_violation(TransportPlan([[0.0, 0.0], [0.5, 0.5]]), half, half)


class TestIncreasingProbability:
    def test_proportional(self):
        np.testing.assert_allclose(increasing_probability([1.0, 1.0, 2.0]).values, [0.25, 0.25, 0.5])

    @pytest.mark.parametrize("g", [None, np.exp, np.sqrt, lambda h: h ** 2 + 1.0])
    def test_constant_input_is_uniform(self, g):
        np.testing.assert_allclose(increasing_probability(np.full(6, 0.3), g).values, np.full(6, 1 / 6))

    def test_monotone(self, rng):
        h = rng.uniform(0, 2, size=10)
        psi = increasing_probability(h, np.exp).values
        order = np.argsort(h)
        assert np.all(np.diff(psi[order]) >= 0)

    def test_all_zero(self):
        with pytest.raises(AllZero):
            increasing_probability(np.zeros(4))


class TestStochasticSinkhornStep:
    def test_first_row_update(self):
        prob = zero_cost_problem([0.3, 0.7], [0.5, 0.5], eta=1.0)
        solver = StochasticSinkhornSolver(prob, tol=1e-9)
        stochastic_sinkhorn_step(solver, 0)
        assert solver.u[0] == pytest.approx(0.15, abs=1e-15)
        assert solver.log_u[0] == pytest.approx(math.log(0.15), abs=1e-15)
        assert solver.iterations == 1

    def test_updated_line_matches_marginal(self, rng):
        prob = random_problem(5, eta=0.3, seed=4)
        solver = StochasticSinkhornSolver(prob, tol=1e-9, seed=1)
        for _ in range(30):
            coordinate = int(rng.integers(2 * prob.n))
            solver.step(coordinate)
            plan = plan_from_scalings(solver.scalings(), prob)
            if coordinate < prob.n:
                assert plan.row_sums()[coordinate] == pytest.approx(prob.p[coordinate], rel=1e-12)
            else:
                assert plan.col_sums()[coordinate - prob.n] == pytest.approx(prob.q[coordinate - prob.n], rel=1e-12)

    def test_maintained_sums_track_plan(self):
        prob = random_problem(6, eta=0.2, seed=5)
        solver = StochasticSinkhornSolver(prob, tol=1e-9, seed=2)
        for _ in range(200):
            solver.step(solver.select_coordinate())
        plan = plan_from_scalings(solver.scalings(), prob)
        np.testing.assert_allclose(solver.row_sums, plan.row_sums(), rtol=1e-9)
        np.testing.assert_allclose(solver.col_sums, plan.col_sums(), rtol=1e-9)

    def test_log_domain_matches_multiplicative(self):
        prob = random_problem(5, eta=0.4, seed=6)
        linear = StochasticSinkhornSolver(prob, tol=1e-9, seed=3)
        logarithmic = StochasticSinkhornSolver(prob, tol=1e-9, seed=3)
        logarithmic.linear = False
        for _ in range(40):
            coordinate = linear.select_coordinate()
            assert logarithmic.select_coordinate() == coordinate
            linear.step(coordinate)
            logarithmic.step(coordinate)
        np.testing.assert_allclose(logarithmic.log_u, linear.log_u, atol=1e-9)
        np.testing.assert_allclose(logarithmic.log_v, linear.log_v, atol=1e-9)

    def test_large_scaled_cost_starts_in_log_domain(self):
        cost = CostMatrix(1.0 - np.eye(3))
        uniform = SimplexVector(np.full(3, 1 / 3))
        prob = EntropicProblem(cost=cost, row_marginal=uniform, col_marginal=uniform, eta=1e-3)
        solver = StochasticSinkhornSolver(prob, tol=1e-9)
        assert not solver.linear and solver.kernel is None
        solver.step(0)
        assert plan_from_scalings(solver.scalings(), prob).row_sums()[0] == pytest.approx(prob.p[0], rel=1e-12)

    def test_index_out_of_range(self):
        solver = StochasticSinkhornSolver(random_problem(3), tol=1e-9)
        with pytest.raises(IndexOutOfRange):
            solver.step(6)
        with pytest.raises(IndexOutOfRange):
            solver.step(-1)


class TestStochasticSinkhornSolve:
    def test_converges(self):
        prob = random_problem(4, eta=0.5, seed=8)
        result = stochastic_sinkhorn_solve(prob, tol=1e-6, seed=11)
        assert result.converged
        assert marginal_residual(result.plan, prob.row_marginal, prob.col_marginal) <= 1e-6

    def test_deterministic_given_seed(self):
        prob = random_problem(6, eta=0.2, seed=9)
        first_counter, second_counter = OpCounter(), OpCounter()
        first = stochastic_sinkhorn_solve(prob, 1e-6, seed=5, counter=first_counter)
        second = stochastic_sinkhorn_solve(prob, 1e-6, seed=5, counter=second_counter)
        np.testing.assert_array_equal(first.plan.entries, second.plan.entries)
        assert first.iterations == second.iterations
        assert first_counter == second_counter

    def test_mean_residual_decreases(self):
        prob = random_problem(4, eta=0.3, seed=10)
        early, late = [], []
        for seed in range(50):
            result = stochastic_sinkhorn_solve(prob, tol=1e-12, seed=seed, max_iters=100, warn=False)
            early.append(result.residual_history[9])
            late.append(result.residual_history[99])
        assert np.mean(late) < np.mean(early)

    @pytest.mark.parametrize("tol", [1e-10, 1e-12])
    def test_tight_tolerance(self, tol):
        prob = random_problem(5, eta=0.5, seed=3)
        result = stochastic_sinkhorn_solve(prob, tol=tol, seed=0, max_iters=20000, strict=True)
        assert marginal_residual(result.plan, prob.row_marginal, prob.col_marginal) <= tol

    def test_zero_violation_draws_from_gaps(self):
        prob = random_problem(4, eta=0.5, seed=8)
        # g drops every violation below 1e-3, so the draw must use the marginal gaps.
        solver = StochasticSinkhornSolver(prob, tol=1e-12, seed=1, g=lambda h: np.where(h > 1e-3, h, 0.0))
        solver.row_sums = prob.p.copy()
        solver.col_sums = prob.q.copy()
        solver.col_sums[2] += 1e-4
        assert {solver.select_coordinate() for _ in range(50)} == {prob.n + 2}

    def test_zero_gaps_draw_uniformly(self):
        prob = random_problem(3, eta=0.5, seed=8)
        solver = StochasticSinkhornSolver(prob, tol=1e-12, seed=1)
        solver.row_sums = prob.p.copy()
        solver.col_sums = prob.q.copy()
        assert {solver.select_coordinate() for _ in range(300)} == set(range(2 * prob.n))

    def test_strict_cap(self):
        prob = random_problem(4, eta=0.3, seed=10)
        with pytest.raises(DidNotConverge) as raised:
            stochastic_sinkhorn_solve(prob, tol=1e-12, max_iters=5, strict=True)
        assert raised.value.result.iterations == 5

    def test_custom_g(self):
        prob = random_problem(4, eta=0.5, seed=12)
        result = stochastic_sinkhorn_solve(prob, tol=1e-6, seed=0, g=np.sqrt)
        assert result.converged


class TestApproximateOTStochastic:
    def test_diagonal_optimum(self, swap_cost):
        half = SimplexVector([0.5, 0.5])
        solution = approximate_ot_stochastic(swap_cost, half, half, 0.1, seed=3)
        assert solution.converged
        assert marginal_residual(solution.plan, half, half) <= 1e-9
        assert np.vdot(swap_cost.entries, solution.plan.entries) <= 0.1

    def test_closed_form_instance(self, oracle_instance):
        cost, p, q = oracle_instance
        solution = approximate_ot_stochastic(cost, p, q, 0.05, seed=3)
        assert marginal_residual(solution.plan, p, q) <= 1e-9
        assert np.vdot(cost.entries, solution.plan.entries) <= 0.25
        assert solution.ops.total() > 0

    def test_zero_cost(self):
        p, q = SimplexVector([0.2, 0.8]), SimplexVector([0.6, 0.4])
        solution = approximate_ot_stochastic(CostMatrix(np.zeros((2, 2))), p, q, 0.1)
        assert solution.result is None
        np.testing.assert_allclose(solution.plan.entries, np.outer(p.values, q.values))
