from .Smoothness import NormKind, SmoothnessProfile, smoothness_constants
from .SemiDualObjective import (DualPoint, tau_of_lambda, semidual_value, semidual_component_value,
                                semidual_component_grad, semidual_component_grads, semidual_full_grad,
                                primal_from_dual)
