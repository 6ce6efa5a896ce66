from dataclasses import dataclass, field
import warnings
from ..Core.Types import TransportPlan, ApproxParams
from ..Core.Errors import DidNotConverge, DidNotConvergeWarning
from ..Utils.OpCounter import OpCounter


@dataclass
class SolveResult:
    '''
    Outcome of one solver run.

    Notes
    -----
    'dual' holds a DualPoint (last anchor v_tilde) for PDASMD and a
    ScalingPair for the Sinkhorn solvers. 'epochs_run' counts outer epochs
    for PDASMD and coincides with 'iterations' for the Sinkhorn solvers.
    The histories hold one entry per residual evaluation.
    '''
    plan: TransportPlan
    dual: object
    epochs_run: int
    iterations: int
    converged: bool
    ops: OpCounter
    residual_history: list = field(default_factory=list)
    cost_history: list = field(default_factory=list)
    gap_history: list = field(default_factory=list)

    @property
    def residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else float('nan')


@dataclass
class OTSolution:
    '''
    A feasible plan for the original marginals, the entropic run that
    produced it (None in the zero-cost case), the accuracy schedule used and
    the convergence flag of the run.
    '''
    plan: TransportPlan
    result: SolveResult
    params: ApproxParams
    converged: bool

    @property
    def ops(self) -> OpCounter:
        return self.result.ops if self.result is not None else OpCounter()


def report_convergence(result, solver_name: str, warn: bool = True, strict: bool = False):
    '''
    Emits DidNotConvergeWarning (or raises DidNotConverge in strict mode)
    for a flagged result. 'result' may be a SolveResult or an OTSolution.
    '''
    if result.converged:
        return result
    message = f"{solver_name} did not reach its stopping criteria before the iteration cap."
    if strict:
        raise DidNotConverge(message, result=result)
    if warn:
        warnings.warn(message, DidNotConvergeWarning, stacklevel=3)
    return result
