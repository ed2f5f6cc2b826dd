"""Entry point for the ellstab command line."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import commands, config
from .errors import EllStabError, PartialFailure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellstab",
        description="Elliptic stable envelopes, R-matrices and vertex functions with numerical verification.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    commands.setup(parser)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else config.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        args.handler(args)
    except PartialFailure as exc:
        # The report is on disk already; a distinct status lets callers tell failures from errors.
        print(str(exc))
        sys.exit(2)
    except (EllStabError, ValueError) as exc:
        print(str(exc))
        sys.exit(1)


if __name__ == "__main__":
    main()
