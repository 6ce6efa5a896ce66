from dataclasses import dataclass, field
import numpy as np
from .Errors import NegativeEntry, SumNotOne, ShapeMismatch, NonFinite


# CONSTANTS.
SIMPLEX_TOLERANCE = 1e-12
FEASIBILITY_TOLERANCE = 1e-9


def _frozen_array(values, ndim: int, owner: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    if array.ndim != ndim:
        raise ShapeMismatch(f"{owner}: expected a {ndim}-dimensional array, got shape {array.shape}.")
    if not np.all(np.isfinite(array)):
        raise NonFinite(f"{owner}: entries must be finite.")
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class SimplexVector:
    '''
    Nonnegative vector whose entries sum to one (within 1e-12). Houses the
    marginals p, q and their smoothed versions p', q'.
    '''
    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values, 1, "SimplexVector")
        if np.any(values < 0):
            raise NegativeEntry(f"SimplexVector: entry {float(values.min())} is negative.")
        if abs(values.sum() - 1.0) > SIMPLEX_TOLERANCE:
            raise SumNotOne(f"SimplexVector: entries sum to {float(values.sum())!r}, expected 1.")
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class CostMatrix:
    '''
    Square nonnegative cost matrix with its cached sup-norm max_abs.
    '''
    entries: np.ndarray
    max_abs: float = field(init=False)

    def __post_init__(self):
        entries = _frozen_array(self.entries, 2, "CostMatrix")
        if entries.shape[0] != entries.shape[1]:
            raise ShapeMismatch(f"CostMatrix: expected a square matrix, got shape {entries.shape}.")
        if np.any(entries < 0):
            raise NegativeEntry(f"CostMatrix: entry {float(entries.min())} is negative.")
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'max_abs', float(entries.max()) if entries.size else 0.0)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class TransportPlan:
    '''
    Nonnegative n x n coupling. Plans with total mass above 1 + 1e-9 are
    rejected unless 'check_mass' is False, which only the scaling solvers use
    for their unnormalized intermediate plans.
    '''
    entries: np.ndarray
    check_mass: bool = field(default=True, repr=False)

    def __post_init__(self):
        entries = _frozen_array(self.entries, 2, "TransportPlan")
        if np.any(entries < 0):
            raise NegativeEntry(f"TransportPlan: entry {float(entries.min())} is negative.")
        if self.check_mass and entries.sum() > 1.0 + FEASIBILITY_TOLERANCE:
            raise ValueError(f"TransportPlan: total mass {float(entries.sum())!r} exceeds 1.")
        object.__setattr__(self, 'entries', entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def total_mass(self) -> float:
        return float(self.entries.sum())

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)


@dataclass(frozen=True, eq=False)
class EntropicProblem:
    '''
    Entropic OT instance consumed by every solver: cost C, strictly positive
    smoothed marginals p', q' and regularization eta.

    Notes
    -----
    C / eta, log p' and log q' are cached at construction since every kernel
    needs them.
    '''
    cost: CostMatrix
    row_marginal: SimplexVector
    col_marginal: SimplexVector
    eta: float

    def __post_init__(self):
        n = self.cost.n
        if self.row_marginal.n != n or self.col_marginal.n != n:
            raise ShapeMismatch(f"EntropicProblem: marginals of length {self.row_marginal.n}/{self.col_marginal.n} "
                                f"do not match the {n} x {n} cost.")
        if not self.eta > 0:
            raise ValueError(f"EntropicProblem: eta must be positive, got {self.eta!r}.")
        if np.any(self.row_marginal.values <= 0) or np.any(self.col_marginal.values <= 0):
            raise ValueError("EntropicProblem: marginals must be strictly positive (smooth them first).")
        object.__setattr__(self, 'eta', float(self.eta))
        scaled = self.cost.entries / self.eta
        scaled.flags.writeable = False
        object.__setattr__(self, 'scaled_cost', scaled)
        object.__setattr__(self, 'log_row', np.log(self.row_marginal.values))
        object.__setattr__(self, 'log_col', np.log(self.col_marginal.values))

    @property
    def n(self) -> int:
        return self.cost.n

    @property
    def p(self) -> np.ndarray:
        return self.row_marginal.values

    @property
    def q(self) -> np.ndarray:
        return self.col_marginal.values


@dataclass(frozen=True)
class ApproxParams:
    '''
    Accuracy schedule of the epsilon-solution pipeline: target eps (cost
    units), eps' = eps / (8 ||C||) and eta = eps / (4 ln n).
    '''
    eps: float
    eps_prime: float
    eta: float

    def __post_init__(self):
        if not (self.eps > 0 and self.eps_prime > 0 and self.eta > 0):
            raise ValueError(f"ApproxParams: all of eps, eps_prime, eta must be positive, got {self}.")


def validate_simplex(values) -> SimplexVector:
    '''
    Returns 'values' as a SimplexVector. Never renormalizes: a vector off the
    simplex by more than 1e-12 raises SumNotOne, a negative entry raises
    NegativeEntry.
    '''
    return SimplexVector(values)
