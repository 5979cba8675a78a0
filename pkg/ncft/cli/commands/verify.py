import argparse
import logging
import time

from ncft.cli.common import add_irrep_options, add_output, add_seed, emit, exponent, load_group, load_table, run_config, space
from ncft.core.config import settings
from ncft.core.exceptions import UsageError
from ncft.models.report import ALL_CHECKS, Report
from ncft.models.space import INF
from ncft.services.verification import InequalityVerifier

logger = logging.getLogger(__name__)


def register(commands):
    parser = commands.add_parser("verify", help="randomized checks of the Fourier inequalities")
    parser.add_argument("--group", required=True)
    parser.add_argument("--suite", default="plancherel,hy,invhy", help=f"comma-separated subset of {','.join(ALL_CHECKS)}")
    parser.add_argument("--p", type=exponent, default=2.0, help="exponent for hy, invhy and holder; p1 for minkowski")
    parser.add_argument("--p2", type=exponent, default=INF, help="second exponent for minkowski")
    parser.add_argument("--E", dest="space", type=space, default="scalar", help="scalar, schatten:m:q or diaglp:n:r")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--n1", type=int, default=2)
    parser.add_argument("--n2", type=int, default=2)
    parser.add_argument("--k1", type=int, default=2)
    parser.add_argument("--k2", type=int, default=2)
    parser.add_argument("--restarts", type=int, default=None, help="optimizer restarts per sandwich")
    parser.add_argument("--iterations", type=int, default=None, help="optimizer iterations per restart")
    add_irrep_options(parser)
    add_seed(parser)
    add_output(parser)
    parser.set_defaults(handler=verify)


def verify(args: argparse.Namespace) -> int:
    checks = [name.strip() for name in args.suite.split(",") if name.strip()]
    unknown = [name for name in checks if name not in ALL_CHECKS]
    if unknown:
        raise UsageError(f"unknown checks {unknown}; choose from {','.join(ALL_CHECKS)}")

    started = time.perf_counter()
    group = load_group(args.group)
    table = load_table(group, args)
    verifier = InequalityVerifier(restarts=args.restarts, iterations=args.iterations)
    report = Report(version=settings.VERSION, config=run_config(args))
    label, space_label = group.label, args.space.label
    logger.info(f"🚀 Verifying {checks} on {label}, {space_label}")

    for check in checks:
        if check == "plancherel":
            verdicts = verifier.check_plancherel(group, table, args.space, args.trials, args.seed)
            report.checks.append(verifier.summarize(check, verdicts, label, space_label, 2.0))
        elif check == "parseval":
            verdicts = verifier.check_parseval(group, table, args.space, args.trials, args.seed)
            report.checks.append(verifier.summarize(check, verdicts, label, space_label))
        elif check == "hy":
            verdicts = verifier.check_hausdorff_young(group, table, args.p, args.space, args.trials, args.seed)
            report.checks.append(verifier.summarize(check, verdicts, label, space_label, args.p))
        elif check == "invhy":
            verdicts = verifier.check_inverse_hy(group, table, args.p, args.space, args.trials, args.seed)
            report.checks.append(verifier.summarize(check, verdicts, label, space_label, args.p))
        elif check == "linf-l1":
            verdicts = verifier.check_linf_l1(group, table, args.space, args.trials, args.seed)
            report.checks.append(verifier.summarize(check, verdicts, label, space_label, 1.0))
        elif check == "holder":
            verdicts = verifier.check_holder_lemma(args.n1, args.n2, args.p, args.trials, args.seed)
            report.checks.append(verifier.summarize(check, verdicts, p=args.p))
        elif check == "minkowski":
            verdicts = verifier.check_minkowski(args.p, args.p2, args.k1, args.k2, args.trials, args.seed)
            report.checks.append(verifier.summarize(check, verdicts, p=args.p))

    report.timing["total"] = time.perf_counter() - started
    emit(report, args.out)
    return report.exit_code()
