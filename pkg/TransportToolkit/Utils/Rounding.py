import numpy as np
from ..Core.Types import SimplexVector, TransportPlan
from ..Core.Errors import ShapeMismatch, NegativeEntry
from .OpCounter import OpCounter, ensure_counter


def round_to_feasible(plan, p: SimplexVector, q: SimplexVector, counter: OpCounter = None) -> TransportPlan:
    '''
    Maps a nonnegative near-solution onto the transport polytope U(p, q):
    (i) scale every row i by min(p_i / (X 1)_i, 1), (ii) scale every column j
    of the result by min(q_j / (X^T 1)_j, 1), (iii) add err_p err_q^T / ||err_p||_1
    with err_p = p - X 1 and err_q = q - X^T 1 of the doubly clipped matrix.

    Notes
    -----
    A zero row or column keeps scaling factor 1; stage (iii) restores its
    mass. Stage (iii) is skipped when the clipped matrix is already feasible.
    The l1 distance to the input is at most twice the input's marginal residual.
    '''
    entries = np.array(plan.entries if isinstance(plan, TransportPlan) else plan, dtype=np.float64)
    n = len(p)
    if entries.shape != (n, len(q)):
        raise ShapeMismatch(f"Rounding.round_to_feasible(): plan shape {entries.shape} does not match marginals ({n}, {len(q)}).")
    if np.any(entries < 0):
        raise NegativeEntry("Rounding.round_to_feasible(): the plan has negative entries.")
    counter = ensure_counter(counter)

    entries *= _clip_factors(entries.sum(axis=1), p.values)[:, None]
    entries *= _clip_factors(entries.sum(axis=0), q.values)[None, :]
    counter.count(adds=2 * n * (n - 1), divs=2 * n, compares=2 * n, muls=2 * n * n)

    # Clipping guarantees both errors are nonnegative up to the last bit.
    err_p = np.maximum(p.values - entries.sum(axis=1), 0.0)
    err_q = np.maximum(q.values - entries.sum(axis=0), 0.0)
    counter.count(adds=2 * n * (n - 1) + 2 * n + n - 1, compares=2 * n)
    mass = err_p.sum()
    if mass > 0:
        entries += np.outer(err_p / mass, err_q)
        counter.count(divs=n, muls=n * n, adds=n * n)
    return TransportPlan(entries)


def _clip_factors(sums: np.ndarray, target: np.ndarray) -> np.ndarray:
    factors = np.ones_like(sums)
    positive = sums > 0
    factors[positive] = np.minimum(target[positive] / sums[positive], 1.0)
    return factors
