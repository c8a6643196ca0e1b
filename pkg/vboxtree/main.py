import argparse
import logging
import sys
import traceback
from typing import List, Optional

from vboxtree.config import LOG_LEVEL
from vboxtree.commands import bench, build, check, experiment, query, viz
from vboxtree.utils.errors import VBoxTreeError

logger = logging.getLogger(__name__)

COMMANDS = (build, query, check, viz, bench, experiment)


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vboxtree",
        description="Approximate nearest neighbours by covering the Voronoi diagram with box trees",
    )
    parser.add_argument("--log-level", default=LOG_LEVEL, help="Logging level (default from VBOXTREE_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.add_parser(subparsers)
    return parser


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Entry point: parse, dispatch, and turn library errors into exit status 1"""
    args = create_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (VBoxTreeError, ValueError, OSError) as e:
        logger.debug(traceback.format_exc())
        print(f"error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
