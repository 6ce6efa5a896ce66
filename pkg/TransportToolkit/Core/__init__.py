from .Types import SimplexVector, CostMatrix, TransportPlan, EntropicProblem, ApproxParams, validate_simplex
from .Objective import entropy, transport_cost, entropic_objective, marginal_residual, independent_coupling
from .Schedule import derive_params, smooth_marginals, build_entropic_problem
