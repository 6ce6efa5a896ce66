from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
import csv
import io
import logging
import time
from ..Core.Objective import transport_cost
from ..Core.Errors import InvalidConfig
from ..SemiDual.Smoothness import NormKind
from ..Solvers.SolverConfig import SolverConfig
from ..Solvers.Approximation import approximate_ot, approximate_ot_sinkhorn, approximate_ot_stochastic
from ..Utils.OpCounter import OpCounter
from ..Utils import PathParser
from .ImageGenerator import gen_image_pair, image_pair_to_problem


logger = logging.getLogger(__name__)

# CONSTANTS.
ALGORITHMS = ('pdasmd_l2', 'pdasmd_linf', 'sinkhorn', 'stochastic_sinkhorn')
CSV_HEADER = ('algo', 'n', 'B', 'eps', 'ops_total', 'iterations', 'residual', 'cost', 'seed', 'wall_ms')
_FLOAT_FORMAT = '.17g'


@dataclass(frozen=True)
class ExperimentRecord:
    '''
    One experiment cell: 'eps' is relative to ||C||, 'residual' is the
    marginal residual of the entropic plan before rounding and 'cost' is
    <C, X> of the rounded plan. 'converged' is kept in memory only.
    '''
    algo: str
    n: int
    B: int
    eps: float
    ops_total: int
    iterations: int
    residual: float
    cost: float
    seed: int
    wall_ms: float
    converged: bool = True

    @property
    def key(self) -> tuple:
        return self.algo, self.n, self.B, self.eps, self.seed

    def csv_row(self) -> list:
        return [self.algo, str(self.n), str(self.B), format(self.eps, _FLOAT_FORMAT), str(self.ops_total),
                str(self.iterations), format(self.residual, _FLOAT_FORMAT), format(self.cost, _FLOAT_FORMAT),
                str(self.seed), format(self.wall_ms, _FLOAT_FORMAT)]


def run_cell(algo: str, side: int, B: int, eps_rel: float, seed: int, timing: bool = False) -> ExperimentRecord:
    '''
    Generates the image pair of 'seed', runs the epsilon-solution pipeline of
    'algo' at eps = eps_rel * ||C|| and records its operation count.
    '''
    _verify_cell(algo, B)
    p, q, C = image_pair_to_problem(*gen_image_pair(side, seed))
    eps = eps_rel * C.max_abs
    counter = OpCounter()
    start = time.perf_counter()
    if algo.startswith('pdasmd'):
        norm_kind = NormKind.L2 if algo == 'pdasmd_l2' else NormKind.LINF
        cfg = SolverConfig(norm_kind=norm_kind, batch=B, seed=seed)
        solution = approximate_ot(C, p, q, eps, cfg, counter=counter, warn=False)
    elif algo == 'sinkhorn':
        solution = approximate_ot_sinkhorn(C, p, q, eps, counter=counter, warn=False)
    else:
        solution = approximate_ot_stochastic(C, p, q, eps, seed=seed, counter=counter, warn=False)
    wall_ms = 1000.0 * (time.perf_counter() - start) if timing else 0.0
    run = solution.result
    if not solution.converged:
        logger.warning(f"{algo} (n={C.n}, B={B}, eps={eps_rel}, seed={seed}) hit its iteration cap.")
    return ExperimentRecord(algo=algo, n=C.n, B=B, eps=float(eps_rel), ops_total=counter.total(),
                            iterations=run.iterations if run else 0, residual=float(run.residual) if run else 0.0,
                            cost=transport_cost(C, solution.plan), seed=seed, wall_ms=wall_ms,
                            converged=solution.converged)


def format_records_csv(records: list) -> str:
    '''
    CSV text with the fixed header and rows sorted by (algo, n, B, eps, seed).
    '''
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in sorted(records, key=lambda r: r.key):
        writer.writerow(record.csv_row())
    return buffer.getvalue()


def write_records_csv(records: list, file_path: str, timing: bool = False):
    '''
    Writes the records as CSV. Without 'timing', wall_ms is written as 0.
    '''
    if not timing:
        records = [replace(record, wall_ms=0.0) for record in records]
    with open(PathParser.output_file(file_path, suffix='.csv'), "w", newline="") as file:
        file.write(format_records_csv(records))


class ExperimentBatch():
    '''
    A set of experiment cells (algo, side, B, eps_rel, seed), run serially or
    on 'jobs' worker processes. Records come back ordered by cell key
    whatever the scheduling.
    '''
    def __init__(self, jobs: int = 1, timing: bool = False):
        if not isinstance(jobs, int) or jobs < 1:
            raise InvalidConfig(f"ExperimentBatch: 'jobs' must be a positive integer, got {jobs!r}.")
        self.cells: list = list()
        self.records: list = list()
        self.jobs: int = jobs
        self.timing: bool = timing

    def add_cell(self, algo: str, side: int, B: int, eps_rel: float, seed: int):
        _verify_cell(algo, B)
        if B > side * side:
            raise InvalidConfig(f"ExperimentBatch.add_cell(): batch {B} exceeds n = {side * side}.")
        self.cells.append((algo, side, B, float(eps_rel), seed))

    def run(self, verbose: int = 0) -> list:
        '''
        Runs every cell and returns the sorted records.
        '''
        if verbose > 0:
            start = time.time()
            logger.info(f"Running {len(self.cells)} experiment cells on {self.jobs} worker(s).")
        arguments = [(*cell, self.timing) for cell in self.cells]
        if self.jobs == 1:
            records = [run_cell(*args) for args in arguments]
        else:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                records = list(pool.map(run_cell, *zip(*arguments)))
        if verbose > 0:
            for record in records:
                logger.info(f"{record.algo} n={record.n} B={record.B} eps={record.eps}: {record.ops_total} ops.")
            logger.info(f"Done. Total execution time: {time.time() - start:.2f} [s].")
        self.records = sorted(records, key=lambda r: r.key)
        return self.records

    def write_csv(self, file_path: str):
        write_records_csv(self.records, file_path, timing=self.timing)


def _verify_cell(algo: str, B: int):
    if algo not in ALGORITHMS:
        raise InvalidConfig(f"ExperimentBatch: algo '{algo}' is not valid. Allowed values are {ALGORITHMS}.")
    if not isinstance(B, int) or B < 1:
        raise InvalidConfig(f"ExperimentBatch: B must be a positive integer, got {B!r}.")
    if B > 1 and not algo.startswith('pdasmd'):
        raise InvalidConfig(f"ExperimentBatch: algo '{algo}' has no batch variant.")
