'''
Primal-dual accelerated stochastic proximal mirror descent (PDASMD) on the
entropic OT semi-dual, and its mini-batch variant PDASMD-B.

Each epoch s anchors a variance-reduced gradient estimator at v_tilde
(one O(n^2) pass over all component gradients), then runs l inner
iterations of O(n) work each: Katyusha coupling of z, v_tilde and y,
importance-sampled component draws, the reduced gradient, a mirror step
on z and a proximal step on y. The primal iterate is the (1/tau_1)-weighted
average of plans recovered from one uniformly drawn y per epoch.

The mirror map is the half squared Euclidean norm, for which both steps
have closed forms.
'''
from dataclasses import dataclass
import logging
import math
import numpy as np
from ..Core.Types import EntropicProblem, TransportPlan
from ..Core.Objective import marginal_residual, entropic_objective, transport_cost
from ..Core.Errors import NonFinite, InvalidConfig
from ..SemiDual.Smoothness import NormKind, SmoothnessProfile, smoothness_constants
from ..SemiDual.SemiDualObjective import (DualPoint, semidual_component_grad, semidual_component_grads,
                                          primal_from_dual, semidual_value)
from ..Utils.OpCounter import OpCounter, ensure_counter
from .SolverConfig import SolverConfig
from .Results import SolveResult, report_convergence


logger = logging.getLogger(__name__)


def schedule(s: int, L_bar: float, B: int = 1) -> tuple:
    '''
    Epoch parameters: tau_1 = 2 / (s + 4), tau_2 = 1 / (2B) and
    alpha = 1 / (9 tau_1 L_bar). tau_1 + tau_2 <= 1 for every s >= 0, B >= 1.
    '''
    tau1 = 2.0 / (s + 4)
    return tau1, 1.0 / (2.0 * B), 1.0 / (9.0 * tau1 * L_bar)


def sample_components(profile: SmoothnessProfile, B: int, rng: np.random.Generator,
                      counter: OpCounter = None) -> np.ndarray:
    '''
    Draws B indices i.i.d. with P(i) = L_i / (n L_bar) (= p'_i for the OT
    semi-dual) by binary search over the profile's cumulative weights.
    '''
    cumulative = profile.cumulative_weights
    draws = rng.random(B) * cumulative[-1]
    ensure_counter(counter).count(muls=B, compares=B * max(1, math.ceil(math.log2(profile.n))))
    return np.minimum(np.searchsorted(cumulative, draws, side='right'), profile.n - 1)


def reduced_gradient(v: np.ndarray, v_tilde: np.ndarray, mu: np.ndarray, indices, profile: SmoothnessProfile,
                     prob: EntropicProblem, anchor_grads: np.ndarray = None, counter: OpCounter = None) -> np.ndarray:
    '''
    mu + (1/B) sum_{i in indices} (grad phi_i(v) - grad phi_i(v_tilde)) / (n p_i),
    an unbiased estimate of grad phi(v) when mu = grad phi(v_tilde).

    Notes
    -----
    'anchor_grads' (row i = grad phi_i(v_tilde)) avoids recomputing the anchor
    terms. The batch correction is summed sequentially in draw order.
    '''
    counter = ensure_counter(counter)
    n = prob.n
    weights = profile.sampling_weights
    correction = np.zeros(n)
    for i in indices:
        i = int(i)
        grad_v = semidual_component_grad(i, v, prob, counter)
        if anchor_grads is not None:
            grad_anchor = anchor_grads[i]
        else:
            grad_anchor = semidual_component_grad(i, v_tilde, prob, counter)
        correction += (grad_v - grad_anchor) / (n * weights[i])
        counter.count(adds=2 * n, muls=1, divs=n)
    counter.count(divs=n, adds=n)
    return mu + correction / len(indices)


def mirror_step_z(z: np.ndarray, grad: np.ndarray, alpha: float, counter: OpCounter = None) -> np.ndarray:
    '''
    argmin_z (1/alpha) V_{z_k}(z) + <grad, z> for V the Euclidean Bregman
    divergence, i.e. z - alpha grad.
    '''
    ensure_counter(counter).count(muls=z.shape[0], adds=z.shape[0])
    return z - alpha * grad


def prox_step_y(v: np.ndarray, grad: np.ndarray, L_bar: float, norm_kind=NormKind.LINF,
                counter: OpCounter = None) -> np.ndarray:
    '''
    argmin_y (9 L_bar / 2) ||y - v||^2 + <grad, y>:
    L2   -> v - grad / (9 L_bar)
    LInf -> v - (||grad||_1 / (9 L_bar)) sign(grad), with sign(0) = -1.
    '''
    counter = ensure_counter(counter)
    n = v.shape[0]
    if NormKind.parse(norm_kind) is NormKind.L2:
        counter.count(muls=n + 1, divs=1, adds=n)
        return v - grad / (9.0 * L_bar)
    counter.count(compares=2 * n, adds=2 * n - 1, muls=n + 1, divs=1)
    step = np.abs(grad).sum() / (9.0 * L_bar)
    return v - step * np.where(grad > 0, 1.0, -1.0)


def theoretical_epochs(prob: EntropicProblem, norm_kind=NormKind.LINF, inner_loops: int = None) -> int:
    '''
    Epoch count of the complexity analysis with log factors dropped:
    ||C|| / eps (1 + sqrt(n / l)) for LInf and sqrt(n) ||C|| / eps (1 + sqrt(1 / l))
    for L2, where eps = 4 eta ln n is the accuracy the problem's eta was derived from.
    '''
    n = prob.n
    l = inner_loops if inner_loops is not None else n
    eps = 4.0 * prob.eta * math.log(max(n, 2))
    ratio = prob.cost.max_abs / eps
    if NormKind.parse(norm_kind) is NormKind.LINF:
        estimate = ratio * (1.0 + math.sqrt(n / l))
    else:
        estimate = math.sqrt(n) * ratio * (1.0 + math.sqrt(1.0 / l))
    return max(1, math.ceil(estimate))


@dataclass
class IterateState:
    '''
    Dual iterates y, z, v, the epoch anchor v_tilde with its full gradient mu
    and component gradients, and the primal accumulators C_acc (sum of 1/tau_1)
    and D_acc (sum of plans / tau_1).
    '''
    y: np.ndarray
    z: np.ndarray
    v: np.ndarray
    v_tilde: np.ndarray
    mu: np.ndarray
    anchor_grads: np.ndarray
    c_acc: float
    d_acc: np.ndarray
    epoch: int = 0


class PDASMDSolver():
    '''
    Stateful PDASMD / PDASMD-B run over one EntropicProblem. Use run() for a
    full solve, or begin_epoch() / inner_step() / end_epoch() to drive and
    inspect single steps.

    Notes
    -----
    Random draws come from numpy's PCG64 generator seeded with cfg.seed, in
    this fixed order per epoch: first the position of the averaged iterate
    y_tilde_s among the l inner iterates, then the B component indices of
    every inner iteration.
    '''
    def __init__(self, prob: EntropicProblem, cfg: SolverConfig, counter: OpCounter = None):
        cfg.validate_for(prob.n)
        self.prob: EntropicProblem = prob
        self.cfg: SolverConfig = cfg
        self.counter: OpCounter = ensure_counter(counter)
        self.profile: SmoothnessProfile = smoothness_constants(prob, cfg.norm_kind)
        self.inner_loops: int = cfg.resolve_inner_loops(prob.n)
        self.max_epochs: int = cfg.resolve_max_epochs(theoretical_epochs(prob, cfg.norm_kind, self.inner_loops))
        self.rng = np.random.default_rng(cfg.seed)
        n = prob.n
        self.state = IterateState(y=np.zeros(n), z=np.zeros(n), v=np.zeros(n), v_tilde=np.zeros(n),
                                  mu=np.zeros(n), anchor_grads=np.zeros((n, n)), c_acc=0.0, d_acc=np.zeros((n, n)))
        self.plan: np.ndarray = np.zeros((n, n))
        self.residual_history: list = []
        self.cost_history: list = []
        self.gap_history: list = []
        self.converged: bool = False
        self.iterations: int = 0
        self._tau: tuple = (0.0, 0.0, 0.0)
        self._pick: int = 0
        self._y_sum: np.ndarray = np.zeros(n)
        self._y_pick: np.ndarray = np.zeros(n)

    def run(self, warn: bool = True, strict: bool = False) -> SolveResult:
        for _ in range(self.max_epochs):
            self.begin_epoch()
            for k in range(self.inner_loops):
                self.inner_step(k)
            if self.end_epoch():
                break
        logger.info(f"PDASMD ({self.cfg.norm_kind.value}, B={self.cfg.batch}) stopped after {self.state.epoch} epochs, "
                    f"residual {self.residual_history[-1]:.3e}, converged: {self.converged}.")
        return report_convergence(self.result(), "PDASMD", warn=warn, strict=strict)

    def begin_epoch(self):
        state, n = self.state, self.prob.n
        self._tau = schedule(state.epoch, self.profile.mean, self.cfg.batch)
        self.counter.count(adds=2, divs=2, muls=2)
        self._pick = int(self.rng.integers(self.inner_loops))
        state.anchor_grads = semidual_component_grads(state.v_tilde, self.prob, self.counter)
        state.mu = state.anchor_grads.mean(axis=0)
        self.counter.count(adds=n * (n - 1), divs=n)
        self._y_sum = np.zeros(n)

    def inner_step(self, k: int):
        state, n = self.state, self.prob.n
        tau1, tau2, alpha = self._tau
        state.v = tau1 * state.z + tau2 * state.v_tilde + (1.0 - tau1 - tau2) * state.y
        self.counter.count(muls=3 * n, adds=2 * n + 2)
        indices = sample_components(self.profile, self.cfg.batch, self.rng, self.counter)
        grad = reduced_gradient(state.v, state.v_tilde, state.mu, indices, self.profile, self.prob,
                                anchor_grads=state.anchor_grads, counter=self.counter)
        state.z = mirror_step_z(state.z, grad, alpha, self.counter)
        state.y = prox_step_y(state.v, grad, self.profile.mean, self.profile.norm_kind, self.counter)
        self._y_sum += state.y
        self.counter.count(adds=n)
        if k == self._pick:
            self._y_pick = state.y.copy()
        self.iterations += 1

    def end_epoch(self) -> bool:
        '''
        Closes the epoch: new anchor, primal averaging and the stopping test.
        Returns True when both stopping targets are met.
        '''
        state, n, prob = self.state, self.prob.n, self.prob
        tau1 = self._tau[0]
        state.v_tilde = self._y_sum / self.inner_loops
        state.d_acc += (1.0 / tau1) * primal_from_dual(self._y_pick, prob, self.counter).entries
        state.c_acc += 1.0 / tau1
        self.plan = state.d_acc / state.c_acc
        self.counter.count(divs=n + 2 + n * n, muls=n * n, adds=n * n + 1)
        state.epoch += 1
        if not (np.all(np.isfinite(state.v_tilde)) and np.all(np.isfinite(self.plan))):
            raise NonFinite(f"PDASMDSolver.end_epoch(): iterates overflowed at epoch {state.epoch}; "
                            f"eta = {prob.eta!r} is too small for float64.")

        residual = marginal_residual(self.plan, prob.row_marginal, prob.col_marginal, self.counter)
        self.residual_history.append(residual)
        self.cost_history.append(transport_cost(prob.cost, self.plan))
        gap = math.inf
        if residual <= self.cfg.stop_residual:
            gap = entropic_objective(prob.cost, self.plan, prob.eta, self.counter) \
                  + semidual_value(state.v_tilde, prob, self.counter)
        self.gap_history.append(gap)
        logger.debug(f"PDASMD epoch {state.epoch}: residual {residual:.3e}, gap {gap:.3e}.")
        self.converged = residual <= self.cfg.stop_residual and gap <= self.cfg.stop_gap
        return self.converged

    def result(self) -> SolveResult:
        return SolveResult(plan=TransportPlan(self.plan), dual=DualPoint(self.state.v_tilde),
                           epochs_run=self.state.epoch, iterations=self.iterations, converged=self.converged,
                           ops=self.counter.snapshot(), residual_history=list(self.residual_history),
                           cost_history=list(self.cost_history), gap_history=list(self.gap_history))


def pdasmd_solve(prob: EntropicProblem, cfg: SolverConfig, counter: OpCounter = None,
                 warn: bool = True, strict: bool = False) -> SolveResult:
    '''
    Plain PDASMD (one component per inner iteration, tau_2 = 1/2).
    '''
    if cfg.batch != 1:
        raise InvalidConfig(f"PDASMD.pdasmd_solve(): batch must be 1, got {cfg.batch}. Use pdasmd_batch_solve().")
    return PDASMDSolver(prob, cfg, counter).run(warn=warn, strict=strict)


def pdasmd_batch_solve(prob: EntropicProblem, cfg: SolverConfig, counter: OpCounter = None,
                       warn: bool = True, strict: bool = False) -> SolveResult:
    '''
    PDASMD-B: B components drawn with replacement per inner iteration,
    tau_2 = 1/(2B), default l = ceil(n / B). With B = 1 it reproduces
    pdasmd_solve bit for bit.
    '''
    return PDASMDSolver(prob, cfg, counter).run(warn=warn, strict=strict)
