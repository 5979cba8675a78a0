import argparse

from ncft.cli.commands import estimate, fourier, group, irreps, suite, verify
from ncft.core.config import settings
from ncft.core.exceptions import UsageError


class NcftArgumentParser(argparse.ArgumentParser):
    """Raise UsageError instead of exiting so run() owns the exit code"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> NcftArgumentParser:
    parser = NcftArgumentParser(
        prog="ncft",
        description="Fourier analysis on finite groups with operator-space values",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default from NCFT_LOG_LEVEL)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default from NCFT_THREADS)")

    commands = parser.add_subparsers(dest="command", required=True, parser_class=NcftArgumentParser)
    group.register(commands)
    irreps.register(commands)
    fourier.register(commands)
    verify.register(commands)
    estimate.register(commands)
    suite.register(commands)
    return parser
