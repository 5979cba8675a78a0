import argparse
import logging

from ncft.cli.common import add_output, add_seed, emit, load_group
from ncft.services.representations import IrrepTable, character_table, compute_irreps, validate_irreps
from ncft.services.storage import encode_complex, read_json_object

logger = logging.getLogger(__name__)


def register(commands):
    parser = commands.add_parser("irreps", help="irreducible unitary representations")
    actions = parser.add_subparsers(dest="action", required=True, parser_class=type(parser))

    compute = actions.add_parser("compute", help="closed-form or numeric irreps of a group")
    compute.add_argument("--group", required=True)
    compute.add_argument("--method", default="auto", choices=["auto", "catalog", "numeric"])
    compute.add_argument("--tol", type=float, default=None, help="eigenvalue clustering tolerance in (0, 1)")
    compute.add_argument("--characters", action="store_true", help="emit the character table instead of matrices")
    add_seed(compute)
    add_output(compute)
    compute.set_defaults(handler=compute_table)

    validate = actions.add_parser("validate", help="residuals of unitarity, orthogonality and completeness")
    validate.add_argument("--in", "--table", dest="table", required=True, help="irrep table JSON; its \"group\" field names the group")
    validate.add_argument("--group", default=None, help="expected group; must match the file")
    add_output(validate)
    validate.set_defaults(handler=validate_table_file)


def compute_table(args: argparse.Namespace) -> int:
    group = load_group(args.group)
    table = compute_irreps(group, method=args.method, seed=args.seed, tol=args.tol)
    if args.characters:
        classes, matrix = character_table(table)
        emit({"group": group.label, "classes": classes, "characters": encode_complex(matrix)}, args.out)
    else:
        emit(table.to_json(), args.out)
    logger.info(f"✅ {group.label}: degrees {table.degrees}")
    return 0


def validate_table_file(args: argparse.Namespace) -> int:
    expected = load_group(args.group) if args.group else None
    table = IrrepTable.from_json(read_json_object(args.table, "irrep table"), expected)
    group = table.group
    report = validate_irreps(table)
    emit(report, args.out)
    if not report.passed:
        logger.error(f"❌ Irrep table for {group.label} failed: {report.failures[0]}")
        return 1
    return 0
