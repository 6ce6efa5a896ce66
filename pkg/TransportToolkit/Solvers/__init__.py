from .SolverConfig import SolverConfig, default_seed
from .Results import SolveResult, OTSolution
from .PDASMD import (PDASMDSolver, schedule, sample_components, reduced_gradient, mirror_step_z, prox_step_y,
                     theoretical_epochs, pdasmd_solve, pdasmd_batch_solve)
from .Sinkhorn import Side, ScalingPair, plan_from_scalings, sinkhorn_step, sinkhorn_solve
from .StochasticSinkhorn import (ViolationVector, StochasticSinkhornSolver, kl_violation, increasing_probability,
                                 stochastic_sinkhorn_step, stochastic_sinkhorn_solve)
from .Approximation import approximate_ot, approximate_ot_stochastic, approximate_ot_sinkhorn
