'''
Command-line front end: data generation, single solves, the scaling
experiments and the exact oracle. Results go to JSON (plans) or CSV
(experiment tables); errors go to stderr.

Exit codes: 0 success, 1 validation error, 2 solver hit its iteration cap.
'''
import argparse
import logging
import sys
from .. import VERSION
from ..Core.Types import CostMatrix
from ..Core.Objective import marginal_residual, transport_cost
from ..Core.Errors import DidNotConverge, TransportToolkitError
from ..SemiDual.Smoothness import NormKind
from ..Solvers.SolverConfig import SolverConfig, default_seed
from ..Solvers.Approximation import approximate_ot, approximate_ot_sinkhorn, approximate_ot_stochastic
from ..Bench.ImageGenerator import gen_image_pair, image_pair_to_problem
from ..Bench.ExactOracle import exact_ot_small
from ..Bench.ExperimentBatch import ALGORITHMS, format_records_csv, write_records_csv
from ..Bench.ScalingExperiments import run_scaling_experiment, run_batch_experiment, run_eps_experiment
from ..Utils import ProblemIO


logger = logging.getLogger(__name__)

# CONSTANTS.
EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2
SOLVE_ALGORITHMS = ('pdasmd', 'pdasmd-b', 'sinkhorn', 'stoch-sinkhorn')
_LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route them to exit code 1 instead.
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def dispatch(argv: list) -> int:
    '''
    Parses 'argv' (without the program name), runs the subcommand and
    returns the exit code.
    '''
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _configure_logging(args.verbose)
        return args.handler(args)
    except DidNotConverge as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (UsageError, TransportToolkitError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(dispatch(sys.argv[1:]))


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="transport-toolkit",
                             description="Entropic optimal transport solvers and operation-count benchmarks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for per-epoch lines")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    gen = commands.add_parser("gen-data", help="generate a synthetic image-pair problem")
    gen.add_argument("--side", type=int, required=True, help="image side s (n = s * s)")
    gen.add_argument("--seed", type=int, default=None, help="seed (default: $OT_SEED or 0)")
    gen.add_argument("--out", required=True, help="problem JSON file")
    gen.add_argument("--png", default=None, metavar="PREFIX", help="also write PREFIX_p.png and PREFIX_q.png")
    gen.set_defaults(handler=_gen_data)

    solve = commands.add_parser("solve", help="compute an eps-solution of a problem file")
    solve.add_argument("--algo", choices=SOLVE_ALGORITHMS, required=True)
    solve.add_argument("--norm", choices=[kind.value for kind in NormKind], default=NormKind.LINF.value)
    accuracy = solve.add_mutually_exclusive_group(required=True)
    accuracy.add_argument("--eps", type=_positive_float, help="accuracy in cost units")
    accuracy.add_argument("--eps-rel", type=_positive_float, help="accuracy relative to max |C_ij|")
    solve.add_argument("--batch", type=int, default=1, help="batch size B (pdasmd-b only)")
    solve.add_argument("--seed", type=int, default=None, help="seed (default: $OT_SEED or 0)")
    solve.add_argument("--max-iters", type=int, default=None,
                       help="epoch cap for pdasmd, iteration cap for the Sinkhorn solvers")
    solve.add_argument("--problem", required=True, help="problem JSON file")
    solve.add_argument("--out", default=None, help="plan JSON file (default: stdout)")
    solve.set_defaults(handler=_solve)

    bench_n = commands.add_parser("bench-n", help="op count vs n")
    bench_n.add_argument("--sides", type=_int_list, required=True, help="comma separated image sides")
    bench_n.add_argument("--eps", type=_positive_float, required=True, help="accuracy relative to max |C_ij|")
    bench_n.add_argument("--algos", type=_algo_list, default=list(ALGORITHMS))
    _add_bench_arguments(bench_n, _bench_n)

    bench_batch = commands.add_parser("bench-batch", help="op count vs batch size (PDASMD-B)")
    bench_batch.add_argument("--side", type=int, required=True)
    bench_batch.add_argument("--batches", type=_int_list, required=True, help="comma separated batch sizes")
    bench_batch.add_argument("--eps", type=_positive_float, required=True, help="accuracy relative to max |C_ij|")
    _add_bench_arguments(bench_batch, _bench_batch)

    bench_eps = commands.add_parser("bench-eps", help="op count vs 1/eps")
    bench_eps.add_argument("--side", type=int, required=True)
    bench_eps.add_argument("--eps-list", type=_float_list, required=True, help="comma separated relative accuracies")
    bench_eps.add_argument("--algos", type=_algo_list, default=['pdasmd_linf', 'stochastic_sinkhorn'])
    _add_bench_arguments(bench_eps, _bench_eps)

    oracle = commands.add_parser("oracle", help="exact OT value of a problem with n <= 32")
    oracle.add_argument("--problem", required=True, help="problem JSON file")
    oracle.set_defaults(handler=_oracle)
    return parser


def _add_bench_arguments(parser: argparse.ArgumentParser, handler):
    parser.add_argument("--seeds", type=_int_list, required=True, help="comma separated seeds")
    parser.add_argument("--csv", default=None, help="CSV file (default: stdout)")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("--timing", action="store_true", help="record wall_ms (breaks byte-identical reruns)")
    parser.set_defaults(handler=handler)


def _gen_data(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    first, second = gen_image_pair(args.side, seed)
    p, q, C = image_pair_to_problem(first, second)
    ProblemIO.save_problem(C, p, q, args.out)
    if args.png:
        first.to_image().save(f"{args.png}_p.png")
        second.to_image().save(f"{args.png}_q.png")
    logger.info(f"Wrote a problem with n = {C.n} to '{args.out}'.")
    return EXIT_OK


def _solve(args) -> int:
    C, p, q = ProblemIO.load_problem(args.problem)
    seed = args.seed if args.seed is not None else default_seed()
    eps = args.eps if args.eps is not None else args.eps_rel * C.max_abs
    if args.algo != 'pdasmd-b' and args.batch != 1:
        raise UsageError(f"--batch {args.batch} needs --algo pdasmd-b.")
    solution = _run_solver(args, C, p, q, eps, seed)

    extra = {'algo': args.algo, 'eps': eps, 'cost': transport_cost(C, solution.plan),
             'residual': marginal_residual(solution.plan, p, q), 'ops_total': solution.ops.total(),
             'iterations': solution.result.iterations if solution.result else 0, 'converged': solution.converged}
    data = ProblemIO.plan_to_dict(solution.plan, extra)
    if args.out:
        ProblemIO.save_json(data, args.out)
    else:
        print(f"cost {extra['cost']!r} residual {extra['residual']!r} ops {extra['ops_total']}")
    if not solution.converged:
        print(f"warning: {args.algo} hit its iteration cap; the rounded plan is feasible but may not be "
              f"an eps-solution.", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _run_solver(args, C: CostMatrix, p, q, eps: float, seed: int):
    caps = {} if args.max_iters is None else {'max_iters': args.max_iters}
    if args.algo in ('pdasmd', 'pdasmd-b'):
        cfg = SolverConfig(norm_kind=args.norm, batch=args.batch, seed=seed, max_epochs=args.max_iters)
        return approximate_ot(C, p, q, eps, cfg, warn=False)
    if args.algo == 'sinkhorn':
        return approximate_ot_sinkhorn(C, p, q, eps, warn=False, **caps)
    return approximate_ot_stochastic(C, p, q, eps, seed=seed, warn=False, **caps)


def _bench_n(args) -> int:
    records = []
    for algo in args.algos:
        records += run_scaling_experiment(args.sides, args.eps, algo, args.seeds, jobs=args.jobs,
                                          timing=args.timing, verbose=args.verbose)
    return _emit_records(records, args)


def _bench_batch(args) -> int:
    records = run_batch_experiment(args.side, args.batches, args.eps, args.seeds, jobs=args.jobs,
                                   timing=args.timing, verbose=args.verbose)
    return _emit_records(records, args)


def _bench_eps(args) -> int:
    records = run_eps_experiment(args.side, args.eps_list, args.algos, args.seeds, jobs=args.jobs,
                                 timing=args.timing, verbose=args.verbose)
    return _emit_records(records, args)


def _emit_records(records: list, args) -> int:
    if args.csv:
        write_records_csv(records, args.csv, timing=args.timing)
    else:
        sys.stdout.write(format_records_csv(records))
    return EXIT_OK


def _oracle(args) -> int:
    C, p, q = ProblemIO.load_problem(args.problem)
    print(exact_ot_small(C, p, q))
    return EXIT_OK


def _configure_logging(verbose: int):
    logging.basicConfig(level=_LOG_LEVELS[min(verbose, len(_LOG_LEVELS) - 1)], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _positive_float(text: str) -> float:
    value = _parse(float, text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got '{text}'")
    return value


def _int_list(text: str) -> list:
    return [_parse(int, item) for item in text.split(",") if item.strip()]


def _float_list(text: str) -> list:
    return [_positive_float(item) for item in text.split(",") if item.strip()]


def _algo_list(text: str) -> list:
    algos = [item.strip() for item in text.split(",") if item.strip()]
    unknown = [algo for algo in algos if algo not in ALGORITHMS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {unknown}; choose from {list(ALGORITHMS)}")
    return algos


def _parse(kind, text: str):
    try:
        return kind(text.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid {kind.__name__} value '{text}'") from None
