import argparse

from pydantic import ValidationError

from ncft.cli.common import add_output, emit, run_config
from ncft.core.exceptions import InvalidSpec
from ncft.models.report import SuiteConfig
from ncft.services.bounds import estimate_rows
from ncft.services.storage import read_json_object, write_estimates_csv
from ncft.services.suite import suite_all

# flag name -> SuiteConfig field for comma-separated list overrides
LIST_FLAGS = {"groups": "groups", "exponents": "exponents", "spaces": "spaces", "checks": "checks", "estimates": "estimates"}
SCALAR_FLAGS = ("trials", "estimate_trials", "level", "budget", "seed")


def register(commands):
    parser = commands.add_parser("suite", help="every check and estimate over a grid of groups, exponents and spaces")
    parser.add_argument("--config", default=None, help="grid JSON; flags below override its fields")
    for flag in LIST_FLAGS:
        parser.add_argument(f"--{flag}", default=None, help="comma-separated")
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--estimate-trials", type=int, default=None)
    parser.add_argument("--level", type=int, default=None)
    parser.add_argument("--budget", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--csv", default=None, help="write (group, kind, p, E, estimate, bound) rows")
    add_output(parser)
    parser.set_defaults(handler=suite)


def build_config(args: argparse.Namespace) -> SuiteConfig:
    fields = read_json_object(args.config, "suite grid") if args.config else {}
    for flag, field in LIST_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            fields[field] = [item.strip() for item in value.split(",") if item.strip()]
    for flag in SCALAR_FLAGS:
        value = getattr(args, flag)
        if value is not None:
            fields[flag] = value
    try:
        return SuiteConfig(**fields)
    except ValidationError as e:
        raise InvalidSpec(f"bad suite grid: {e.errors()[0]['loc']}: {e.errors()[0]['msg']}") from e


def suite(args: argparse.Namespace) -> int:
    config = build_config(args)
    if args.seed is None:
        args.seed = config.seed
    report = suite_all(config, run_config=run_config(args, csv=args.csv))
    if args.csv:
        write_estimates_csv(estimate_rows(report.estimates), args.csv)
    emit(report, args.out)
    return report.exit_code()
