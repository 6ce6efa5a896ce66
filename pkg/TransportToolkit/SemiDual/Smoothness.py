from dataclasses import dataclass
from enum import Enum
import numpy as np
from ..Core.Types import EntropicProblem


# CONSTANTS.
_LINF_FACTOR = 5.0


class NormKind(str, Enum):
    L2 = "l2"
    LINF = "linf"

    @classmethod
    def parse(cls, value) -> "NormKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"NormKind.parse(): '{value}' is not a norm kind. Allowed values are 'l2' or 'linf'.") from None


@dataclass(frozen=True, eq=False)
class SmoothnessProfile:
    '''
    Per-component smoothness constants L_i of the semi-dual finite sum, their
    mean L_bar, and the cumulative sampling weights L_i / (n L_bar) used for
    inverse-CDF index draws.
    '''
    per_component: np.ndarray
    mean: float
    norm_kind: NormKind

    def __post_init__(self):
        if np.any(self.per_component <= 0):
            raise ValueError("SmoothnessProfile: every L_i must be positive.")
        weights = self.per_component / (self.per_component.shape[0] * self.mean)
        cumulative = np.cumsum(weights)
        cumulative.flags.writeable = False
        object.__setattr__(self, 'sampling_weights', weights)
        object.__setattr__(self, 'cumulative_weights', cumulative)

    @property
    def n(self) -> int:
        return self.per_component.shape[0]


def smoothness_constants(prob: EntropicProblem, norm_kind=NormKind.LINF) -> SmoothnessProfile:
    '''
    phi_i is n p'_i / eta smooth w.r.t. ||.||_2 and 5 n p'_i / eta smooth
    w.r.t. ||.||_inf, hence L_bar = 1/eta or 5/eta.
    '''
    norm_kind = NormKind.parse(norm_kind)
    factor = _LINF_FACTOR if norm_kind is NormKind.LINF else 1.0
    per_component = factor * prob.n * prob.p / prob.eta
    per_component.flags.writeable = False
    return SmoothnessProfile(per_component=per_component, mean=factor / prob.eta, norm_kind=norm_kind)
