'''
Operation-count scaling experiments: ops vs n, ops vs batch size B and
ops vs 1/eps, each averaged over seeds before the log-log fit.
'''
from collections import defaultdict
import numpy as np
from ..Core.Errors import InvalidConfig
from .ExperimentBatch import ExperimentBatch
from .SlopeFit import fit_loglog_slope


# CONSTANTS.
BATCH_ALGO = 'pdasmd_linf'
_MIN_EPS_SPAN = 8.0


def run_scaling_experiment(sides: list, eps: float, algo: str, seeds: list, jobs: int = 1,
                           timing: bool = False, verbose: int = 0) -> list:
    '''
    One record per (side, seed); 'eps' is relative to ||C||.
    '''
    batch = ExperimentBatch(jobs=jobs, timing=timing)
    for side in sides:
        for seed in seeds:
            batch.add_cell(algo, side, 1, eps, seed)
    return batch.run(verbose=verbose)


def run_batch_experiment(side: int, Bs: list, eps: float, seeds: list, jobs: int = 1,
                         timing: bool = False, verbose: int = 0) -> list:
    '''
    PDASMD-B (l-infinity geometry, l = ceil(n / B)) per (B, seed).
    '''
    batch = ExperimentBatch(jobs=jobs, timing=timing)
    for B in Bs:
        for seed in seeds:
            batch.add_cell(BATCH_ALGO, side, B, eps, seed)
    return batch.run(verbose=verbose)


def run_eps_experiment(side: int, eps_list: list, algos: list, seeds: list, jobs: int = 1,
                       timing: bool = False, verbose: int = 0) -> list:
    '''
    One record per (algo, eps, seed). The eps values must span a factor of 8.
    '''
    if not eps_list or max(eps_list) < _MIN_EPS_SPAN * min(eps_list):
        raise InvalidConfig(f"ScalingExperiments.run_eps_experiment(): eps values {eps_list} "
                            f"must span at least a factor of {_MIN_EPS_SPAN:g}.")
    batch = ExperimentBatch(jobs=jobs, timing=timing)
    for algo in algos:
        for eps in eps_list:
            for seed in seeds:
                batch.add_cell(algo, side, 1, eps, seed)
    return batch.run(verbose=verbose)


def mean_ops(records: list, x_of) -> list:
    '''
    [(x, mean ops_total)] over the records grouped by x_of(record), sorted by x.
    '''
    groups = defaultdict(list)
    for record in records:
        groups[x_of(record)].append(record.ops_total)
    return [(x, float(np.mean(groups[x]))) for x in sorted(groups)]


def ops_slope(records: list, x_of) -> float:
    '''
    Log-log slope of the seed-averaged op count against x_of(record).
    '''
    return fit_loglog_slope(mean_ops(records, x_of))[0]
