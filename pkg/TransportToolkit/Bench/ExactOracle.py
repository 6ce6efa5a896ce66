'''
Exact OT value of small dense instances, used as the reference that
epsilon-solutions are checked against.

n = 2 is solved in closed form. For n >= 3 the transportation simplex runs
on a spanning-tree basis: north-west corner start, potentials from the tree,
Bland's rule for the entering cell (first negative reduced cost in row-major
order) and for the leaving cell (smallest row-major index among the tied
minus-cells of the cycle).
'''
from collections import deque
import logging
import numpy as np
from ..Core.Types import CostMatrix, SimplexVector, TransportPlan
from ..Core.Objective import transport_cost
from ..Core.Errors import DidNotConverge, ShapeMismatch, TooLarge


logger = logging.getLogger(__name__)

# CONSTANTS.
MAX_ORACLE_SIZE = 32
_MAX_PIVOTS = 100000
_REDUCED_COST_TOLERANCE = 1e-12


def exact_ot_small(C: CostMatrix, p: SimplexVector, q: SimplexVector) -> float:
    '''
    min <C, X> over X in U(p, q) for n <= 32.
    '''
    return transport_cost(C, exact_ot_plan(C, p, q))


def exact_ot_plan(C: CostMatrix, p: SimplexVector, q: SimplexVector) -> TransportPlan:
    '''
    An optimal vertex of U(p, q).
    '''
    n = C.n
    if len(p) != n or len(q) != n:
        raise ShapeMismatch(f"ExactOracle.exact_ot_plan(): marginals of length {len(p)}/{len(q)} do not match "
                            f"the {n} x {n} cost.")
    if n > MAX_ORACLE_SIZE:
        raise TooLarge(f"ExactOracle.exact_ot_plan(): n = {n} exceeds the oracle limit {MAX_ORACLE_SIZE}.")
    if n == 1:
        return TransportPlan(np.ones((1, 1)))
    if n == 2:
        return _closed_form_2x2(C.entries, p.values, q.values)
    return TransportPlan(_transportation_simplex(C.entries, p.values, q.values))


def _closed_form_2x2(cost: np.ndarray, p: np.ndarray, q: np.ndarray) -> TransportPlan:
    # X = [[t, p1 - t], [q1 - t, 1 - p1 - q1 + t]], linear in t.
    low, high = max(0.0, p[0] + q[0] - 1.0), min(p[0], q[0])
    slope = cost[0, 0] - cost[0, 1] - cost[1, 0] + cost[1, 1]
    t = low if slope > 0 else high
    plan = np.array([[t, p[0] - t], [q[0] - t, 1.0 - p[0] - q[0] + t]])
    return TransportPlan(np.maximum(plan, 0.0))


def _north_west_corner(supply: np.ndarray, demand: np.ndarray) -> dict:
    supply, demand = supply.copy(), demand.copy()
    m, n = supply.shape[0], demand.shape[0]
    basis, i, j = {}, 0, 0
    while True:
        amount = min(supply[i], demand[j])
        basis[(i, j)] = amount
        supply[i] -= amount
        demand[j] -= amount
        if i == m - 1 and j == n - 1:
            return basis
        if i < m - 1 and (supply[i] <= demand[j] or j == n - 1):
            i += 1
        else:
            j += 1


def _tree_adjacency(basis: dict, m: int, n: int) -> list:
    # Rows are nodes 0..m-1, columns m..m+n-1.
    adjacency = [[] for _ in range(m + n)]
    for (i, j) in basis:
        adjacency[i].append(m + j)
        adjacency[m + j].append(i)
    return adjacency


def _potentials(cost: np.ndarray, basis: dict, adjacency: list, m: int) -> tuple:
    n = cost.shape[1]
    u, v = np.zeros(m), np.zeros(n)
    seen = [False] * (m + n)
    seen[0] = True
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for other in adjacency[node]:
            if seen[other]:
                continue
            seen[other] = True
            if node < m:
                v[other - m] = cost[node, other - m] - u[node]
            else:
                u[other] = cost[other, node - m] - v[node - m]
            queue.append(other)
    return u, v


def _tree_path(adjacency: list, start: int, goal: int) -> list:
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for other in adjacency[node]:
            if other not in parent:
                parent[other] = node
                queue.append(other)
    path = [goal]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def _transportation_simplex(cost: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    m, n = cost.shape
    basis = _north_west_corner(p, q)
    tolerance = _REDUCED_COST_TOLERANCE * (1.0 + float(np.abs(cost).max()))
    for pivot in range(_MAX_PIVOTS):
        adjacency = _tree_adjacency(basis, m, n)
        u, v = _potentials(cost, basis, adjacency, m)
        reduced = cost - u[:, None] - v[None, :]
        candidates = np.argwhere(reduced < -tolerance)
        entering = next((tuple(int(k) for k in cell) for cell in candidates if tuple(cell) not in basis), None)
        if entering is None:
            logger.debug(f"Transportation simplex optimal after {pivot} pivots.")
            break

        i, j = entering
        path = _tree_path(adjacency, i, m + j)
        cells = [(a, b - m) if a < m else (b, a - m) for a, b in zip(path[:-1], path[1:])]
        # Cycle signs along the path from row i: -, +, -, ..., - (the entering cell is +).
        minus, plus = cells[0::2], cells[1::2]
        theta = min(basis[cell] for cell in minus)
        leaving = min((cell for cell in minus if basis[cell] == theta), key=lambda cell: cell[0] * n + cell[1])
        for cell in minus:
            basis[cell] -= theta
        for cell in plus:
            basis[cell] += theta
        del basis[leaving]
        basis[entering] = theta
    else:
        raise DidNotConverge(f"ExactOracle: transportation simplex exceeded {_MAX_PIVOTS} pivots.")

    plan = np.zeros((m, n))
    for (i, j), amount in basis.items():
        plan[i, j] = max(amount, 0.0)
    return plan
