import argparse
from pathlib import Path

from vboxtree.utils.persistence import load_index
from vboxtree.utils.svg import render_index_svg


def add_parser(subparsers):
    parser = subparsers.add_parser("viz", help="Render a 2-D index as SVG")
    parser.add_argument("index", help="Index file")
    parser.add_argument("output", help="SVG file to write")
    parser.add_argument("--leaf", type=int, default=None, help="Outline the auxiliary roots of this multi-site leaf")
    parser.add_argument("--size", type=float, default=800.0, help="Picture side in pixels")
    parser.set_defaults(handler=handle)
    return parser


def handle(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    Path(args.output).write_text(render_index_svg(index, leaf=args.leaf, size=args.size), encoding="utf-8")
    return 0
