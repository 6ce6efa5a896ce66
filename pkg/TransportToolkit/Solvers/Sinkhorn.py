from dataclasses import dataclass
from enum import Enum
import logging
import numpy as np
from scipy.special import logsumexp
from ..Core.Types import EntropicProblem, TransportPlan
from ..Core.Objective import marginal_residual, transport_cost
from ..Core.Errors import NonFinite, ShapeMismatch
from ..Utils.OpCounter import OpCounter, ensure_counter, count_logsumexp_rows
from .Results import SolveResult, report_convergence


logger = logging.getLogger(__name__)

# CONSTANTS.
DEFAULT_MAX_ITERS = 100000


class Side(str, Enum):
    ROW = "row"
    COL = "col"


@dataclass(frozen=True, eq=False)
class ScalingPair:
    '''
    Sinkhorn scalings (u, v) stored as log u, log v.
    '''
    log_u: np.ndarray
    log_v: np.ndarray

    def __post_init__(self):
        log_u = np.array(self.log_u, dtype=np.float64, copy=True)
        log_v = np.array(self.log_v, dtype=np.float64, copy=True)
        if log_u.ndim != 1 or log_u.shape != log_v.shape:
            raise ShapeMismatch(f"ScalingPair: log_u {log_u.shape} and log_v {log_v.shape} must be vectors of equal length.")
        if not (np.all(np.isfinite(log_u)) and np.all(np.isfinite(log_v))):
            raise NonFinite("ScalingPair: scalings must be finite.")
        log_u.flags.writeable = False
        log_v.flags.writeable = False
        object.__setattr__(self, 'log_u', log_u)
        object.__setattr__(self, 'log_v', log_v)

    @classmethod
    def ones(cls, n: int) -> "ScalingPair":
        return cls(np.zeros(n), np.zeros(n))


def plan_from_scalings(scalings: ScalingPair, prob: EntropicProblem, counter: OpCounter = None) -> TransportPlan:
    '''
    X = diag(u) exp(-C / eta) diag(v), formed in the log domain and
    exponentiated once. The plan is generally unnormalized.
    '''
    n = prob.n
    ensure_counter(counter).count(adds=2 * n * n, exps=n * n)
    return TransportPlan(np.exp(scalings.log_u[:, None] - prob.scaled_cost + scalings.log_v[None, :]), check_mass=False)


def sinkhorn_step(scalings: ScalingPair, prob: EntropicProblem, side=Side.ROW, counter: OpCounter = None) -> ScalingPair:
    '''
    One half-step of log-domain Sinkhorn. Side.ROW sets
    log u = log p' - log sum_j exp(log v_j - C_ij / eta) so the new plan has
    row sums p'; Side.COL is the symmetric update for q'.
    '''
    n = prob.n
    counter = ensure_counter(counter)
    count_logsumexp_rows(counter, n, n)
    counter.count(adds=n)
    if Side(side) is Side.ROW:
        log_u = prob.log_row - logsumexp(scalings.log_v[None, :] - prob.scaled_cost, axis=1)
        return ScalingPair(log_u, scalings.log_v)
    log_v = prob.log_col - logsumexp(scalings.log_u[:, None] - prob.scaled_cost, axis=0)
    return ScalingPair(scalings.log_u, log_v)


def sinkhorn_solve(prob: EntropicProblem, tol: float, max_iters: int = DEFAULT_MAX_ITERS,
                   counter: OpCounter = None, warn: bool = True, strict: bool = False) -> SolveResult:
    '''
    Classical Sinkhorn: alternating Row/Col half-steps from u = v = 1 until
    the marginal residual of the current plan is <= tol or 'max_iters'
    half-steps have run.

    Notes
    -----
    'iterations' in the result counts half-steps. The l1 marginal residual is
    non-increasing along the half-steps.
    '''
    if not tol > 0:
        raise ValueError(f"Sinkhorn.sinkhorn_solve(): tol must be positive, got {tol!r}.")
    counter = ensure_counter(counter)
    scalings = ScalingPair.ones(prob.n)
    plan = plan_from_scalings(scalings, prob)
    residual_history, cost_history = [], []
    converged, iterations = False, 0
    for iterations in range(1, max_iters + 1):
        side = Side.ROW if iterations % 2 == 1 else Side.COL
        scalings = sinkhorn_step(scalings, prob, side, counter)
        plan = plan_from_scalings(scalings, prob, counter)
        residual = marginal_residual(plan, prob.row_marginal, prob.col_marginal, counter)
        residual_history.append(residual)
        cost_history.append(transport_cost(prob.cost, plan))
        if residual <= tol:
            converged = True
            break
    logger.info(f"Sinkhorn stopped after {iterations} half-steps, residual {residual_history[-1]:.3e}.")
    result = SolveResult(plan=plan, dual=scalings, epochs_run=iterations, iterations=iterations,
                         converged=converged, ops=counter.snapshot(), residual_history=residual_history,
                         cost_history=cost_history)
    return report_convergence(result, "Sinkhorn", warn=warn, strict=strict)
