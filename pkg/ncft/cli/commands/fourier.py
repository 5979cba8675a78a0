import argparse

from ncft.cli.common import add_irrep_options, emit, load_table
from ncft.core.exceptions import ShapeMismatch
from ncft.services.fourier import GroupFunction, SpectralArray, forward, inverse
from ncft.services.groups import build_group
from ncft.services.storage import read_json_object


def register(commands):
    parser = commands.add_parser("fourier", help="vector-valued Fourier transform and its inverse")
    actions = parser.add_subparsers(dest="action", required=True, parser_class=type(parser))

    for name, handler, text in (
        ("forward", forward_transform, "function JSON -> spectrum JSON"),
        ("inverse", inverse_transform, "spectrum JSON -> function JSON"),
    ):
        action = actions.add_parser(name, help=text)
        action.add_argument("--in", dest="source", required=True)
        action.add_argument("--out", default=None)
        add_irrep_options(action)
        action.set_defaults(handler=handler, seed=0)


def forward_transform(args: argparse.Namespace) -> int:
    payload = read_json_object(args.source, "function")
    f = GroupFunction.from_json(payload)
    emit(forward(f, load_table(f.group, args)).to_json(), args.out)
    return 0


def inverse_transform(args: argparse.Namespace) -> int:
    payload = read_json_object(args.source, "spectrum")
    if "group" not in payload:
        raise ShapeMismatch("spectrum file needs a 'group' field")
    group = build_group(payload["group"])
    spectrum = SpectralArray.from_json(payload, load_table(group, args))
    emit(inverse(spectrum).to_json(), args.out)
    return 0
