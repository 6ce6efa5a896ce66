'''
Stochastic Sinkhorn: at every iteration one row or column scaling is
rescaled to match its marginal exactly. The coordinate is drawn with
probability Psi(rho), an increasing function of its KL violation.

Row and column sums of the current plan are maintained incrementally, so
one iteration costs O(n): a row rescale changes a single row of the plan,
hence one row sum and every column sum by a rank-one update.
'''
from dataclasses import dataclass
import logging
import math
import numpy as np
from scipy.special import kl_div, logsumexp
from ..Core.Types import EntropicProblem, SimplexVector, TransportPlan
from ..Core.Objective import residual_from_sums, transport_cost
from ..Core.Errors import AllZero, DegenerateRow, IndexOutOfRange, NegativeEntry
from ..Utils.OpCounter import OpCounter, ensure_counter
from .Sinkhorn import ScalingPair, plan_from_scalings
from .Results import SolveResult, report_convergence


logger = logging.getLogger(__name__)

# CONSTANTS.
DEFAULT_MAX_ITERS = 2000000
_LOG_LIMIT = 300.0


@dataclass(frozen=True, eq=False)
class ViolationVector:
    '''
    KL violations [KL(p_i || (X1)_i)]_i followed by [KL(q_j || (X^T 1)_j)]_j.
    '''
    rho: np.ndarray

    def __post_init__(self):
        if np.any(self.rho < 0):
            raise NegativeEntry("ViolationVector: KL violations are nonnegative.")


def kl_violation(plan, p: SimplexVector, q: SimplexVector, counter: OpCounter = None) -> ViolationVector:
    '''
    Scalar KL(a || b) = a log(a / b) - a + b between every target marginal
    entry and the matching row/column sum of the plan.
    '''
    entries = plan.entries if isinstance(plan, TransportPlan) else np.asarray(plan, dtype=np.float64)
    return ViolationVector(_violations(entries.sum(axis=1), entries.sum(axis=0), p.values, q.values,
                                       ensure_counter(counter)))


def increasing_probability(h: np.ndarray, g=None) -> SimplexVector:
    '''
    Psi(h)_i = g(h_i) / sum_j g(h_j) for an increasing positive map g
    (identity by default).
    '''
    weights = _apply_g(np.asarray(h, dtype=np.float64), g)
    total = weights.sum()
    if not total > 0:
        raise AllZero("StochasticSinkhorn.increasing_probability(): sum of g(h) is zero.")
    return SimplexVector(weights / total)


class StochasticSinkhornSolver():
    '''
    Stochastic Sinkhorn over one EntropicProblem, starting from u = v = 1.

    Notes
    -----
    Coordinates 0..n-1 address rows (u), n..2n-1 columns (v). Updates run
    in the multiplicative domain with the kernel exp(-C / eta) while the
    kernel and every scaling stay within exp(+-300); past that the solver
    switches permanently to log-domain updates. Scalings are always stored
    in the log domain.
    '''
    def __init__(self, prob: EntropicProblem, tol: float, seed: int = 0, max_iters: int = DEFAULT_MAX_ITERS,
                 g=None, counter: OpCounter = None):
        if not tol > 0:
            raise ValueError(f"StochasticSinkhornSolver: tol must be positive, got {tol!r}.")
        n = prob.n
        self.prob: EntropicProblem = prob
        self.tol: float = tol
        self.max_iters: int = max_iters
        self.g = g
        self.counter: OpCounter = ensure_counter(counter)
        self.rng = np.random.default_rng(seed)
        self.log_u: np.ndarray = np.zeros(n)
        self.log_v: np.ndarray = np.zeros(n)
        self.linear: bool = float(prob.scaled_cost.max()) < _LOG_LIMIT
        self.kernel: np.ndarray = np.exp(-prob.scaled_cost) if self.linear else None
        self.u: np.ndarray = np.ones(n)
        self.v: np.ndarray = np.ones(n)
        self.counter.count(exps=n * n if self.linear else 0)
        self.row_sums, self.col_sums = self._exact_sums()
        self.iterations: int = 0
        self.residual_history: list = []

    def residual(self) -> float:
        return residual_from_sums(self.row_sums, self.col_sums, self.prob.p, self.prob.q, self.counter)

    def select_coordinate(self) -> int:
        '''
        Draws a coordinate with probability Psi(rho(X; p', q')). Near
        convergence rho can cancel to exactly zero in float64; the draw then
        falls back to the absolute marginal gaps.
        '''
        n = self.prob.n
        rho = _violations(self.row_sums, self.col_sums, self.prob.p, self.prob.q, self.counter)
        cumulative = np.cumsum(_apply_g(rho, self.g))
        if not cumulative[-1] > 0:
            cumulative = self._fallback_weights()
        self.counter.count(adds=2 * n, muls=1, compares=math.ceil(math.log2(2 * n)))
        draw = self.rng.random() * cumulative[-1]
        return int(min(np.searchsorted(cumulative, draw, side='right'), 2 * n - 1))

    def step(self, coordinate: int):
        '''
        Rescales row 'coordinate' (< n) or column 'coordinate - n' so that it
        matches its marginal exactly, and updates the maintained sums.
        '''
        n = self.prob.n
        if not 0 <= coordinate < 2 * n:
            raise IndexOutOfRange(f"StochasticSinkhornSolver.step(): coordinate {coordinate} is outside [0, {2 * n}).")
        if coordinate < n:
            self._rescale(coordinate, self.log_u, self.u, self.log_v, self.v, self.prob.log_row, self.prob.p,
                          self.row_sums, self.col_sums, axis=0)
        else:
            self._rescale(coordinate - n, self.log_v, self.v, self.log_u, self.u, self.prob.log_col, self.prob.q,
                          self.col_sums, self.row_sums, axis=1)
        self.iterations += 1

    def run(self, warn: bool = True, strict: bool = False) -> SolveResult:
        converged = False
        residual = self.residual()
        while True:
            if residual <= self.tol:
                # Maintained sums drift slowly; confirm on the exact plan before stopping.
                self.row_sums, self.col_sums = self._exact_sums()
                residual = self.residual()
                if residual <= self.tol:
                    converged = True
                    break
            if self.iterations >= self.max_iters:
                break
            self.step(self.select_coordinate())
            residual = self.residual()
            self.residual_history.append(residual)
        scalings = ScalingPair(self.log_u, self.log_v)
        plan = plan_from_scalings(scalings, self.prob, self.counter)
        logger.info(f"Stochastic Sinkhorn stopped after {self.iterations} iterations, residual {residual:.3e}.")
        result = SolveResult(plan=plan, dual=scalings, epochs_run=self.iterations, iterations=self.iterations,
                             converged=converged, ops=self.counter.snapshot(),
                             residual_history=list(self.residual_history) or [residual],
                             cost_history=[transport_cost(self.prob.cost, plan)])
        return report_convergence(result, "Stochastic Sinkhorn", warn=warn, strict=strict)

    def scalings(self) -> ScalingPair:
        return ScalingPair(self.log_u, self.log_v)

    def _rescale(self, index: int, log_own: np.ndarray, own: np.ndarray, log_other: np.ndarray, other: np.ndarray,
                 log_target: np.ndarray, target: np.ndarray, own_sums: np.ndarray, other_sums: np.ndarray, axis: int):
        n = self.prob.n
        if self.linear:
            kernel_line = self.kernel[index] if axis == 0 else self.kernel[:, index]
            weighted = kernel_line * other
            new_value = target[index] / weighted.sum()
            other_sums += (new_value - own[index]) * weighted
            self.counter.count(muls=2 * n, adds=2 * n, divs=1, logs=1, compares=1)
            own[index] = new_value
            log_own[index] = math.log(new_value)
            if abs(log_own[index]) > _LOG_LIMIT:
                self.linear = False
        else:
            cost_line = self.prob.scaled_cost[index] if axis == 0 else self.prob.scaled_cost[:, index]
            exponent = log_other - cost_line
            new_log = log_target[index] - logsumexp(exponent)
            other_sums += np.exp(new_log + exponent) - np.exp(log_own[index] + exponent)
            self.counter.count(adds=6 * n + 2, exps=3 * n, compares=n - 1, logs=1)
            log_own[index] = new_log
            own[index] = math.exp(new_log) if abs(new_log) <= _LOG_LIMIT else own[index]
        own_sums[index] = target[index]

    def _fallback_weights(self) -> np.ndarray:
        '''
        Cumulative weights used once every KL violation has rounded to zero
        while the l1 residual is still above tol: absolute marginal gaps,
        or uniform when those vanish too.
        '''
        n = self.prob.n
        gaps = np.concatenate((np.abs(self.row_sums - self.prob.p), np.abs(self.col_sums - self.prob.q)))
        self.counter.count(adds=2 * n)
        cumulative = np.cumsum(gaps)
        if not cumulative[-1] > 0:
            logger.debug("Every marginal gap is zero; sampling a coordinate uniformly.")
            return np.arange(1, 2 * n + 1, dtype=np.float64)
        return cumulative

    def _exact_sums(self) -> tuple:
        plan = plan_from_scalings(ScalingPair(self.log_u, self.log_v), self.prob, self.counter).entries
        self.counter.count(adds=2 * plan.size)
        row_sums, col_sums = plan.sum(axis=1), plan.sum(axis=0)
        if np.any(row_sums <= 0) or np.any(col_sums <= 0):
            raise DegenerateRow("StochasticSinkhornSolver: a plan row or column sum underflowed to zero.")
        return row_sums, col_sums


def stochastic_sinkhorn_step(state: StochasticSinkhornSolver, coordinate: int):
    '''
    Rescales a single coordinate of a running solver (0-based; rows first).
    '''
    state.step(coordinate)


def stochastic_sinkhorn_solve(prob: EntropicProblem, tol: float, seed: int = 0, max_iters: int = DEFAULT_MAX_ITERS,
                              g=None, counter: OpCounter = None, warn: bool = True, strict: bool = False) -> SolveResult:
    return StochasticSinkhornSolver(prob, tol, seed=seed, max_iters=max_iters, g=g, counter=counter).run(warn, strict)


def _violations(row_sums: np.ndarray, col_sums: np.ndarray, p: np.ndarray, q: np.ndarray,
                counter: OpCounter) -> np.ndarray:
    if np.any(row_sums <= 0) or np.any(col_sums <= 0):
        raise DegenerateRow("StochasticSinkhorn: KL violation needs positive row and column sums.")
    n = row_sums.shape[0]
    counter.count(divs=2 * n, logs=2 * n, muls=2 * n, adds=4 * n)
    return np.concatenate((kl_div(p, row_sums), kl_div(q, col_sums)))


def _apply_g(h: np.ndarray, g) -> np.ndarray:
    return h if g is None else np.asarray(g(h), dtype=np.float64)
