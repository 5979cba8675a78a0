import argparse
import time

from ncft.cli.common import add_irrep_options, add_output, add_seed, emit, exponent, load_group, load_table, run_config, space
from ncft.core.config import settings
from ncft.models.report import Report
from ncft.models.verdict import EstimateKind
from ncft.services.bounds import check_theorem_bounds, estimate_rows
from ncft.services.estimation import ConstantEstimator
from ncft.services.storage import write_estimates_csv


def register(commands):
    parser = commands.add_parser("estimate", help="lower bounds on truncated Fourier type and cotype constants")
    parser.add_argument("action", choices=[kind.value for kind in EstimateKind])
    parser.add_argument("--group", required=True)
    parser.add_argument("--E", dest="space", type=space, default="scalar")
    parser.add_argument("--p", type=exponent, required=True, help="exponent in [1, 2]")
    parser.add_argument("--level", type=int, default=settings.DEFAULT_LEVEL, help=f"amplification level, at most {settings.MAX_LEVEL}")
    parser.add_argument("--budget", type=int, default=None, help="ratio evaluations per level")
    parser.add_argument("--trials", type=int, default=None, help="random candidates per level")
    parser.add_argument("--strict", action="store_true", help="fail when the budget runs out")
    parser.add_argument("--csv", default=None, help="also write (group, kind, p, E, estimate, bound) rows")
    add_irrep_options(parser)
    add_seed(parser)
    add_output(parser)
    parser.set_defaults(handler=estimate)


def estimate(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    group = load_group(args.group)
    table = load_table(group, args)
    result = ConstantEstimator().estimate(
        EstimateKind(args.action), group, table, args.p, args.space,
        level=args.level, budget=args.budget, seed=args.seed, trials=args.trials, strict=args.strict,
    )
    report = Report(
        version=settings.VERSION,
        config=run_config(args, csv=args.csv),
        estimates=[result],
        bounds=check_theorem_bounds([result]),
    )
    report.timing["total"] = time.perf_counter() - started
    if args.csv:
        write_estimates_csv(estimate_rows(report.estimates), args.csv)
    emit(report, args.out)
    return report.exit_code()
