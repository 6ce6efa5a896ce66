'''
Epsilon-solution pipelines: derive (eta, eps'), smooth the marginals, solve
the entropic problem until its stopping surrogate holds, then round the
result onto U(p, q).
'''
from dataclasses import replace
import logging
from ..Core.Types import CostMatrix, SimplexVector
from ..Core.Objective import independent_coupling
from ..Core.Schedule import derive_params, build_entropic_problem
from ..Core.Errors import ShapeMismatch, ZeroCost
from ..Utils.OpCounter import OpCounter, ensure_counter
from ..Utils.Rounding import round_to_feasible
from .SolverConfig import SolverConfig
from .Results import OTSolution, report_convergence
from .PDASMD import PDASMDSolver
from .Sinkhorn import sinkhorn_solve, DEFAULT_MAX_ITERS as SINKHORN_MAX_ITERS
from .StochasticSinkhorn import stochastic_sinkhorn_solve, DEFAULT_MAX_ITERS as STOCHASTIC_MAX_ITERS


logger = logging.getLogger(__name__)


def approximate_ot(C: CostMatrix, p: SimplexVector, q: SimplexVector, eps: float, cfg: SolverConfig = None,
                   counter: OpCounter = None, warn: bool = True, strict: bool = False) -> OTSolution:
    '''
    PDASMD (or PDASMD-B when cfg.batch > 1) epsilon-solution: stops once the
    realized residual is <= eps'/2 and the gap surrogate is <= eps/4, then
    rounds. The plan satisfies X 1 = p and X^T 1 = q to 1e-9.
    '''
    cfg = cfg if cfg is not None else SolverConfig()
    counter = ensure_counter(counter)

    def solve(prob, params):
        run_cfg = replace(cfg, stop_residual=params.eps_prime / 2.0, stop_gap=params.eps / 4.0)
        return PDASMDSolver(prob, run_cfg, counter).run(warn=False)

    return _approximate(C, p, q, eps, solve, "PDASMD", counter, warn, strict)


def approximate_ot_stochastic(C: CostMatrix, p: SimplexVector, q: SimplexVector, eps: float, seed: int = 0,
                              max_iters: int = STOCHASTIC_MAX_ITERS, counter: OpCounter = None,
                              warn: bool = True, strict: bool = False) -> OTSolution:
    '''
    Stochastic Sinkhorn epsilon-solution with tol = eps'/2.
    '''
    counter = ensure_counter(counter)

    def solve(prob, params):
        return stochastic_sinkhorn_solve(prob, params.eps_prime / 2.0, seed=seed, max_iters=max_iters,
                                         counter=counter, warn=False)

    return _approximate(C, p, q, eps, solve, "Stochastic Sinkhorn", counter, warn, strict)


def approximate_ot_sinkhorn(C: CostMatrix, p: SimplexVector, q: SimplexVector, eps: float,
                            max_iters: int = SINKHORN_MAX_ITERS, counter: OpCounter = None,
                            warn: bool = True, strict: bool = False) -> OTSolution:
    '''
    Classical Sinkhorn epsilon-solution with tol = eps'/2.
    '''
    counter = ensure_counter(counter)

    def solve(prob, params):
        return sinkhorn_solve(prob, params.eps_prime / 2.0, max_iters=max_iters, counter=counter, warn=False)

    return _approximate(C, p, q, eps, solve, "Sinkhorn", counter, warn, strict)


def _approximate(C: CostMatrix, p: SimplexVector, q: SimplexVector, eps: float, solve, solver_name: str,
                 counter: OpCounter, warn: bool, strict: bool) -> OTSolution:
    n = C.n
    if len(p) != n or len(q) != n:
        raise ShapeMismatch(f"Approximation: marginals of length {len(p)}/{len(q)} do not match the {n} x {n} cost.")
    try:
        params = derive_params(eps, C, n)
    except ZeroCost:
        logger.info("Zero cost matrix, returning the independent coupling.")
        return OTSolution(plan=independent_coupling(p, q), result=None, params=None, converged=True)

    prob = build_entropic_problem(C, p, q, params)
    result = solve(prob, params)
    plan = round_to_feasible(result.plan, p, q, counter)
    solution = OTSolution(plan=plan, result=result, params=params, converged=result.converged)
    return report_convergence(solution, solver_name, warn=warn, strict=strict)
