'''
Semi-dual of entropic OT. With tau eliminated through its first-order
condition, the dual becomes a smooth finite sum

    phi(lambda) = (1/n) sum_i phi_i(lambda),
    phi_i(lambda) = n p'_i [eta - <q', lambda> - eta log p'_i + eta LSE_i(lambda)],
    LSE_i(lambda) = log sum_j exp((lambda_j - C_ij - eta) / eta),

and the primal plan is recovered row by row as X_ij = p'_i softmax_j((lambda - C_i) / eta).
Every exponential goes through a max-shifted log-sum-exp or softmax.
'''
from dataclasses import dataclass
import numpy as np
from scipy.special import logsumexp, softmax
from ..Core.Types import EntropicProblem, TransportPlan
from ..Core.Errors import IndexOutOfRange, NonFinite, ShapeMismatch
from ..Utils.OpCounter import OpCounter, ensure_counter, count_softmax_rows, count_logsumexp_rows


@dataclass(frozen=True, eq=False)
class DualPoint:
    '''
    Semi-dual variable lambda (cost units). tau is never stored, see tau_of_lambda.
    '''
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 1:
            raise ShapeMismatch(f"DualPoint: expected a vector, got shape {values.shape}.")
        if not np.all(np.isfinite(values)):
            raise NonFinite("DualPoint: entries must be finite.")
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)


def tau_of_lambda(lam, prob: EntropicProblem) -> np.ndarray:
    '''
    tau_i(lambda) = eta log p'_i - eta LSE_i(lambda).
    '''
    return prob.eta * (prob.log_row - _row_logsumexp(_vector(lam, prob), prob))


def semidual_value(lam, prob: EntropicProblem, counter: OpCounter = None) -> float:
    '''
    phi(lambda) = eta - <q', lambda> - eta sum p'_i log p'_i + eta sum p'_i LSE_i(lambda).
    '''
    lam = _vector(lam, prob)
    n = prob.n
    counter = ensure_counter(counter)
    count_logsumexp_rows(counter, n, n)
    counter.count(muls=3 * n + 2, adds=3 * n + 1)
    lse = _row_logsumexp(lam, prob)
    return float(prob.eta - prob.q @ lam - prob.eta * (prob.p @ prob.log_row) + prob.eta * (prob.p @ lse))


def semidual_component_value(i: int, lam, prob: EntropicProblem) -> float:
    '''
    phi_i(lambda); the mean over i equals semidual_value.
    '''
    _verify_index(i, prob.n)
    lam = _vector(lam, prob)
    lse = logsumexp((lam - prob.eta) / prob.eta - prob.scaled_cost[i])
    return float(prob.n * prob.p[i] * (prob.eta - prob.q @ lam - prob.eta * prob.log_row[i] + prob.eta * lse))


def semidual_component_grad(i: int, lam, prob: EntropicProblem, counter: OpCounter = None) -> np.ndarray:
    '''
    grad phi_i(lambda) = n p'_i (-q' + softmax((lambda - C_i) / eta)).
    Costs O(n) operations.
    '''
    _verify_index(i, prob.n)
    lam = _vector(lam, prob)
    n = prob.n
    counter = ensure_counter(counter)
    count_softmax_rows(counter, 1, n)
    counter.count(adds=n, muls=n + 1)
    return (n * prob.p[i]) * (softmax(lam / prob.eta - prob.scaled_cost[i]) - prob.q)


def semidual_component_grads(lam, prob: EntropicProblem, counter: OpCounter = None) -> np.ndarray:
    '''
    All component gradients at once; row i is grad phi_i(lambda). O(n^2).
    '''
    lam = _vector(lam, prob)
    n = prob.n
    counter = ensure_counter(counter)
    count_softmax_rows(counter, n, n)
    counter.count(adds=n * n, muls=n * n + n)
    return (n * prob.p)[:, None] * (_row_softmax(lam, prob) - prob.q[None, :])


def semidual_full_grad(lam, prob: EntropicProblem, counter: OpCounter = None) -> np.ndarray:
    '''
    grad phi(lambda) = -q' + sum_i p'_i softmax((lambda - C_i) / eta), O(n^2).
    '''
    lam = _vector(lam, prob)
    n = prob.n
    counter = ensure_counter(counter)
    count_softmax_rows(counter, n, n)
    counter.count(muls=n * n, adds=n * (n - 1) + n)
    return prob.p @ _row_softmax(lam, prob) - prob.q


def primal_from_dual(lam, prob: EntropicProblem, counter: OpCounter = None) -> TransportPlan:
    '''
    X(lambda)_ij = p'_i softmax_j((lambda_j - C_ij) / eta). Row sums equal p'
    by construction and X(lambda)^T 1 - q' = grad phi(lambda).
    '''
    lam = _vector(lam, prob)
    n = prob.n
    counter = ensure_counter(counter)
    count_softmax_rows(counter, n, n)
    counter.count(muls=n * n)
    return TransportPlan(prob.p[:, None] * _row_softmax(lam, prob))


def _row_softmax(lam: np.ndarray, prob: EntropicProblem) -> np.ndarray:
    return softmax(lam[None, :] / prob.eta - prob.scaled_cost, axis=1)


def _row_logsumexp(lam: np.ndarray, prob: EntropicProblem) -> np.ndarray:
    return logsumexp((lam[None, :] - prob.eta) / prob.eta - prob.scaled_cost, axis=1)


def _vector(lam, prob: EntropicProblem) -> np.ndarray:
    values = lam.values if isinstance(lam, DualPoint) else np.asarray(lam, dtype=np.float64)
    if values.shape != (prob.n,):
        raise ShapeMismatch(f"SemiDualObjective: lambda has shape {values.shape}, expected ({prob.n},).")
    return values


def _verify_index(i: int, n: int):
    if not 0 <= i < n:
        raise IndexOutOfRange(f"SemiDualObjective: component index {i} is outside [0, {n}).")
