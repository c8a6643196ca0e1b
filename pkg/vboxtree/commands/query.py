import argparse

from vboxtree.config import MAX_HASH_CELLS
from vboxtree.utils.boxtree import enable_hash_locate
from vboxtree.utils.index import query
from vboxtree.utils.persistence import load_index
from vboxtree.utils.points import parse_point_string
from vboxtree.commands.common import emit_record


def add_parser(subparsers):
    parser = subparsers.add_parser("query", help="Answer one query from a saved index")
    parser.add_argument("index", help="Index file")
    parser.add_argument("point", nargs="+", help="d whitespace-separated coordinates")
    parser.add_argument("--hash-locate", action="store_true", help="Locate leaves through the grid overlay")
    parser.set_defaults(handler=handle)
    return parser


def handle(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    if args.hash_locate:
        enable_hash_locate(index, MAX_HASH_CELLS)
    q = parse_point_string(" ".join(args.point), index.dim)
    result = query(index, q)
    emit_record(
        sprime=result.s_prime,
        exact=result.exact,
        nodes_visited=result.nodes_visited,
    )
    return 0
