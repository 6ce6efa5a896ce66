import numpy as np
from scipy.special import entr
from .Types import CostMatrix, TransportPlan, SimplexVector
from .Errors import ShapeMismatch
from ..Utils.OpCounter import OpCounter, ensure_counter


def entropy(plan: TransportPlan, counter: OpCounter = None) -> float:
    '''
    H(X) = -sum X_ij log X_ij with the convention 0 log 0 = 0 (natural log).
    '''
    entries = _entries(plan)
    ensure_counter(counter).count(logs=entries.size, muls=entries.size, adds=entries.size)
    return float(entr(entries).sum())


def transport_cost(cost: CostMatrix, plan: TransportPlan, counter: OpCounter = None) -> float:
    '''
    Frobenius inner product <C, X>.
    '''
    entries = _entries(plan)
    _verify_shapes(cost.entries.shape, entries.shape, "transport_cost")
    ensure_counter(counter).count(muls=entries.size, adds=entries.size - 1)
    return float(np.vdot(cost.entries, entries))


def entropic_objective(cost: CostMatrix, plan: TransportPlan, eta: float, counter: OpCounter = None) -> float:
    '''
    f(X) = <C, X> - eta H(X), the objective of entropic OT.
    '''
    counter = ensure_counter(counter)
    value = transport_cost(cost, plan, counter) - eta * entropy(plan, counter)
    counter.count(adds=1, muls=1)
    return value


def marginal_residual(plan: TransportPlan, p: SimplexVector, q: SimplexVector, counter: OpCounter = None) -> float:
    '''
    ||X 1 - p||_1 + ||X^T 1 - q||_1.
    '''
    entries = _entries(plan)
    _verify_shapes(entries.shape, (len(p), len(q)), "marginal_residual")
    n = entries.shape[0]
    ensure_counter(counter).count(adds=2 * entries.size + 2 * n, compares=2 * n)
    return float(np.abs(entries.sum(axis=1) - p.values).sum() + np.abs(entries.sum(axis=0) - q.values).sum())


def residual_from_sums(row_sums: np.ndarray, col_sums: np.ndarray, p: np.ndarray, q: np.ndarray,
                       counter: OpCounter = None) -> float:
    # Marginal residual when the plan's row/column sums are already known.
    n = row_sums.shape[0]
    ensure_counter(counter).count(adds=4 * n - 1, compares=2 * n)
    return float(np.abs(row_sums - p).sum() + np.abs(col_sums - q).sum())


def independent_coupling(p: SimplexVector, q: SimplexVector) -> TransportPlan:
    '''
    The product coupling p q^T, feasible for any pair of marginals.
    '''
    return TransportPlan(np.outer(p.values, q.values))


def _entries(plan) -> np.ndarray:
    return plan.entries if isinstance(plan, TransportPlan) else np.asarray(plan, dtype=np.float64)


def _verify_shapes(shape_a: tuple, shape_b: tuple, owner: str):
    if tuple(shape_a) != tuple(shape_b):
        raise ShapeMismatch(f"{owner}(): shapes {tuple(shape_a)} and {tuple(shape_b)} do not match.")
