from dataclasses import dataclass
import math
import os
from ..Core.Errors import InvalidConfig
from ..SemiDual.Smoothness import NormKind


# CONSTANTS.
SEED_ENV_VAR = "OT_SEED"
_REQUIRED_SETTINGS = {'norm_kind'}
_OPTIONAL_SETTINGS = {'inner_loops', 'max_epochs', 'batch', 'seed', 'stop_residual', 'stop_gap'}
_MIN_EPOCH_CAP = 5000
_EPOCH_CAP_FACTOR = 10


def default_seed() -> int:
    '''
    Seed taken from the OT_SEED environment variable, 0 when unset.
    '''
    raw = os.environ.get(SEED_ENV_VAR, "0")
    try:
        return int(raw)
    except ValueError:
        raise InvalidConfig(f"SolverConfig.default_seed(): {SEED_ENV_VAR}='{raw}' is not an integer.") from None


@dataclass(frozen=True)
class SolverConfig:
    '''
    Settings of a PDASMD / PDASMD-B run.

    Notes
    -----
    'inner_loops' and 'max_epochs' may be left as None; they resolve per
    problem through resolve_inner_loops() and resolve_max_epochs().
    'batch' = 1 gives plain PDASMD. The stopping rule needs both the realized
    marginal residual <= stop_residual and the duality-gap surrogate <= stop_gap.
    The defaults (0 and inf) demand an exact zero residual, so a bare
    SolverConfig() normally runs to the epoch cap and warns; approximate_ot()
    sets eps'/2 and eps/4.
    '''
    norm_kind: NormKind = NormKind.LINF
    inner_loops: int = None
    max_epochs: int = None
    batch: int = 1
    seed: int = 0
    stop_residual: float = 0.0
    stop_gap: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, 'norm_kind', NormKind.parse(self.norm_kind))
        for name in ('inner_loops', 'max_epochs'):
            value = getattr(self, name)
            if value is not None and (not isinstance(value, int) or value < 1):
                raise InvalidConfig(f"SolverConfig: '{name}' must be a positive integer, got {value!r}.")
        if not isinstance(self.batch, int) or self.batch < 1:
            raise InvalidConfig(f"SolverConfig: 'batch' must be a positive integer, got {self.batch!r}.")
        if self.stop_residual < 0 or self.stop_gap < 0:
            raise InvalidConfig("SolverConfig: stopping targets must be nonnegative.")

    @classmethod
    def from_settings(cls, settings: dict) -> "SolverConfig":
        '''
        Builds a config from a settings dict. 'norm_kind' is required; the
        optional keys are inner_loops, max_epochs, batch, seed, stop_residual
        and stop_gap. A missing seed falls back to OT_SEED.
        '''
        if not isinstance(settings, dict):
            raise TypeError(f"SolverConfig.from_settings(): 'settings' cannot be of type '{type(settings)}'. "
                            "Allowed type is dict.")
        missing = _REQUIRED_SETTINGS.difference(settings.keys())
        if missing:
            raise KeyError(f"SolverConfig.from_settings(): Missing keys {missing}.")
        unknown = set(settings.keys()).difference(_REQUIRED_SETTINGS | _OPTIONAL_SETTINGS)
        if unknown:
            raise KeyError(f"SolverConfig.from_settings(): Unknown keys {unknown}.")
        return cls(**{'seed': default_seed(), **settings})

    def validate_for(self, n: int):
        if self.batch > n:
            raise InvalidConfig(f"SolverConfig: batch {self.batch} exceeds the problem size {n}.")

    def resolve_inner_loops(self, n: int) -> int:
        # l = n for PDASMD, l = ceil(n / B) for PDASMD-B.
        return self.inner_loops if self.inner_loops is not None else math.ceil(n / self.batch)

    def resolve_max_epochs(self, theoretical_epochs: int) -> int:
        if self.max_epochs is not None:
            return self.max_epochs
        return max(_MIN_EPOCH_CAP, _EPOCH_CAP_FACTOR * theoretical_epochs)
