import argparse
import logging
import math
import sys
from typing import Optional

from ncft.core.config import settings
from ncft.core.exceptions import InvalidSpec, InvalidTable, UsageError
from ncft.models.report import RunConfig
from ncft.models.space import OperatorSpaceDesc, parse_exponent
from ncft.services.groups import FiniteGroup, build_group
from ncft.services.representations import IrrepTable, compute_irreps, validate_irreps
from ncft.services.storage import read_json_object, write_json

logger = logging.getLogger(__name__)


def exponent(text: str) -> float:
    """argparse type for exponents: 1, 4/3, 2.5, inf"""
    try:
        return parse_exponent(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def space(text: str) -> OperatorSpaceDesc:
    try:
        return OperatorSpaceDesc.parse(text)
    except InvalidSpec as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def add_seed(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="base seed for every random stream")


def add_output(parser: argparse.ArgumentParser):
    parser.add_argument("--out", default=None, help="write JSON here instead of stdout")


def add_irrep_options(parser: argparse.ArgumentParser):
    parser.add_argument("--table", default=None, help="irrep table JSON (computed when omitted)")
    parser.add_argument("--method", default="auto", choices=["auto", "catalog", "numeric"])


def load_table(group: FiniteGroup, args: argparse.Namespace) -> IrrepTable:
    """
    Irrep table from --table, or computed for the group when none is given.

    A file must name the same group and pass validate_irreps; otherwise
    GroupMismatch or InvalidTable is raised.
    """
    path = getattr(args, "table", None)
    if not path:
        return compute_irreps(group, method=getattr(args, "method", "auto"), seed=getattr(args, "seed", 0))
    table = IrrepTable.from_json(read_json_object(path, "irrep table"), group)
    report = validate_irreps(table)
    if not report.passed:
        raise InvalidTable(f"{path} is not a valid irrep table for {group.label}: {report.failures[0]}", report.failures)
    return table


def load_group(spec: Optional[str]) -> FiniteGroup:
    if not spec:
        raise UsageError("a group spec is required, e.g. --group S3")
    return build_group(spec)


def _flag_value(value):
    if isinstance(value, OperatorSpaceDesc):
        return value.label
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def run_config(args: argparse.Namespace, **outputs) -> RunConfig:
    flags = {
        key: _flag_value(value) for key, value in vars(args).items() if key != "handler"
    }
    return RunConfig(
        command=" ".join(str(part) for part in (args.command, getattr(args, "action", None)) if part),
        flags=flags,
        seed=getattr(args, "seed", settings.DEFAULT_SEED),
        threads=settings.THREADS,
        tolerances=settings.tolerances(),
        outputs={"out": getattr(args, "out", None), **outputs},
    )


def emit(payload, out: Optional[str]) -> None:
    """JSON to a file, or to stdout when no path was given"""
    text = write_json(payload, out)
    if out is None:
        sys.stdout.write(text + "\n")
