import argparse
import logging

from ncft.cli.common import add_output, emit
from ncft.services.groups import build_group, validate_table

logger = logging.getLogger(__name__)


def register(commands):
    parser = commands.add_parser("group", help="build and inspect finite groups")
    actions = parser.add_subparsers(dest="action", required=True, parser_class=type(parser))

    show = actions.add_parser("show", help="order, conjugacy classes and axiom checks of a group")
    show.add_argument("--spec", "--group", dest="spec", required=True, help='e.g. S3, D4, Q8, "Z2xZ3", table:g.json')
    add_output(show)
    show.set_defaults(handler=show_group)


def show_group(args: argparse.Namespace) -> int:
    group = build_group(args.spec)
    payload = group.summary()
    payload["validation"] = validate_table(group.mul.tolist()).model_dump()
    emit(payload, args.out)
    logger.info(f"✅ {group.label}: order {group.order}, {len(group.classes)} classes")
    return 0
