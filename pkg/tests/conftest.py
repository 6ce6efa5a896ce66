import numpy as np
import pytest

from TransportToolkit.Core import CostMatrix, SimplexVector, EntropicProblem


def random_simplex(rng, n, floor=0.0):
    values = rng.dirichlet(np.ones(n)) + floor
    values = values / values.sum()
    # Fold the last-bit error into the largest entry so the 1e-12 sum check holds.
    values[np.argmax(values)] += 1.0 - values.sum()
    return SimplexVector(values)


def random_problem(n, eta=0.5, seed=0, floor=1e-3):
    rng = np.random.default_rng(seed)
    cost = CostMatrix(rng.uniform(0.0, 1.0, size=(n, n)))
    return EntropicProblem(cost=cost, row_marginal=random_simplex(rng, n, floor),
                           col_marginal=random_simplex(rng, n, floor), eta=eta)


def zero_cost_problem(p, q, eta=1.0):
    n = len(p)
    return EntropicProblem(cost=CostMatrix(np.zeros((n, n))), row_marginal=SimplexVector(p),
                           col_marginal=SimplexVector(q), eta=eta)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def swap_cost():
    return CostMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))


@pytest.fixture
def oracle_instance(swap_cost):
    '''
    p = (0.3, 0.7), q = (0.5, 0.5), C = [[0, 1], [1, 0]]; OT* = 0.2.
    '''
    return swap_cost, SimplexVector([0.3, 0.7]), SimplexVector([0.5, 0.5])
