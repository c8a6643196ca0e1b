import argparse

from vboxtree.config import DEFAULT_MARGIN, DEFAULT_MAX_DIM
from vboxtree.utils.analysis import depth_bound, main_node_bound
from vboxtree.utils.cells import SiteSet
from vboxtree.utils.index import build
from vboxtree.utils.persistence import save_index
from vboxtree.utils.points import read_points
from vboxtree.utils.schema import BuildOptions
from vboxtree.commands.common import emit, parse_scale


def add_parser(subparsers):
    parser = subparsers.add_parser("build", help="Build an index from a points file")
    parser.add_argument("input", help="Points file: one point per line")
    parser.add_argument("--eps", type=float, required=True, help="Approximation radius")
    parser.add_argument("--margin", type=float, default=DEFAULT_MARGIN, help="Bounding box margin")
    parser.add_argument("--scale", type=parse_scale, default=None, help="Auxiliary scale or 'auto'")
    parser.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM)
    parser.add_argument("-o", "--output", required=True, help="Index file to write")
    parser.set_defaults(handler=handle)
    return parser


def handle(args: argparse.Namespace) -> int:
    """Build, save and report build statistics"""
    sites = SiteSet(read_points(args.input))
    options = BuildOptions(margin=args.margin, scale=args.scale, max_dim=args.max_dim)
    index = build(sites, args.eps, options)
    save_index(index, args.output)

    stats = index.stats
    d = index.dim
    emit(
        n=sites.n,
        dim=d,
        eps=index.params.eps,
        delta=index.params.delta,
        scale=index.params.scale_factor,
        volume_ratio=stats.volume_ratio,
        main_nodes=stats.main_nodes,
        main_node_bound=main_node_bound(stats.volume_ratio, d),
        main_leaves=stats.main_leaves,
        multi_site_leaves=stats.multi_site_leaves,
        max_main_depth=stats.max_main_depth,
        depth_bound=depth_bound(stats.volume_ratio, d),
        aux_trees=stats.aux_trees,
        aux_nodes=stats.aux_nodes,
        max_aux_depth=stats.max_aux_depth,
        feasibility_calls=stats.feasibility_calls,
        lp_solves=stats.lp_solves,
        leaf_site_entries=stats.leaf_site_entries,
        cached_site_entries=stats.cached_site_entries,
    )
    return 0
