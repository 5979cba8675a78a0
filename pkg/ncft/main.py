import logging
import sys
from typing import Optional, Sequence

from ncft.cli.parser import build_parser
from ncft.core.config import settings, setup_logging
from ncft.core.exceptions import NcftError, UsageError

logger = logging.getLogger(__name__)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, dispatch to the command handler and map the outcome to an
    exit code: 0 ok, 1 usage or input error, 2 violated verdict or bound flag.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"{e}\nRun 'ncft --help' for usage.", file=sys.stderr)
        return 1
    except SystemExit as e:
        # --help and --version
        return int(e.code or 0)

    setup_logging(args.log_level)
    if args.threads is not None:
        settings.THREADS = max(1, args.threads)

    try:
        return args.handler(args)
    except UsageError as e:
        print(f"ncft: {e}", file=sys.stderr)
        return 1
    except NcftError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        print(f"ncft: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        logger.error(f"❌ File error: {e}")
        print(f"ncft: cannot access {e.filename or 'file'}: {e.strerror or e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
