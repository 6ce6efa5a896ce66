import math
import numpy as np
from .Types import ApproxParams, CostMatrix, EntropicProblem, SimplexVector
from .Errors import TooSmallProblem, ZeroCost, BadEpsPrime


def derive_params(eps: float, cost: CostMatrix, n: int) -> ApproxParams:
    '''
    Accuracy schedule of the epsilon-solution pipeline:
    eta = eps / (4 ln n) and eps' = eps / (8 ||C||).

    Notes
    -----
    ||C|| = 0 raises ZeroCost: every feasible plan is optimal and the entropic
    scaling is undefined, so callers return the independent coupling instead.
    '''
    if not eps > 0:
        raise ValueError(f"Schedule.derive_params(): eps must be positive, got {eps!r}.")
    if n < 2:
        raise TooSmallProblem(f"Schedule.derive_params(): n = {n} is too small, log(n) must be positive.")
    if cost.max_abs <= 0:
        raise ZeroCost("Schedule.derive_params(): ||C|| = 0, every feasible plan is optimal.")
    return ApproxParams(eps=float(eps), eps_prime=eps / (8.0 * cost.max_abs), eta=eps / (4.0 * math.log(n)))


def smooth_marginals(p: SimplexVector, q: SimplexVector, eps_prime: float) -> tuple:
    '''
    Shrinks both marginals toward uniform:
    (p'; q') = (1 - eps'/8)(p; q) + eps'/(8n)(1; 1).
    Every output entry is at least eps'/(8n) > 0.
    '''
    if not (eps_prime > 0 and eps_prime / 8.0 < 1.0):
        raise BadEpsPrime(f"Schedule.smooth_marginals(): eps_prime = {eps_prime!r} must lie in (0, 8).")
    shrink, floor = 1.0 - eps_prime / 8.0, eps_prime / (8.0 * len(p))
    return _shrink(p.values, shrink, floor), _shrink(q.values, shrink, floor)


def build_entropic_problem(cost: CostMatrix, p: SimplexVector, q: SimplexVector, params: ApproxParams) -> EntropicProblem:
    p_smooth, q_smooth = smooth_marginals(p, q, params.eps_prime)
    return EntropicProblem(cost=cost, row_marginal=p_smooth, col_marginal=q_smooth, eta=params.eta)


def _shrink(values: np.ndarray, shrink: float, floor: float) -> SimplexVector:
    smoothed = shrink * values + floor
    # Push the last-bit rounding error onto the largest entry so the sum stays within tolerance.
    smoothed[np.argmax(smoothed)] += 1.0 - smoothed.sum()
    return SimplexVector(smoothed)
