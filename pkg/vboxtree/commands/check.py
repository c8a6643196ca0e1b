import argparse

from vboxtree.config import ORACLE_SAMPLES, ORACLE_SLACK
from vboxtree.utils.oracle import check_index
from vboxtree.utils.persistence import load_index
from vboxtree.utils.schema import OracleConfig
from vboxtree.commands.common import emit


def add_parser(subparsers):
    parser = subparsers.add_parser("check", help="Audit a saved index against the sampled oracle")
    parser.add_argument("index", help="Index file")
    parser.add_argument("--queries", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=ORACLE_SAMPLES, help="Samples per oracle ball")
    parser.add_argument("--slack", type=float, default=ORACLE_SLACK)
    parser.add_argument("--workers", type=int, default=1, help="Query threads")
    parser.set_defaults(handler=handle)
    return parser


def handle(args: argparse.Namespace) -> int:
    """Completeness is a hard failure; soundness and the sandwich are rates."""
    index = load_index(args.index)
    cfg = OracleConfig(samples_per_ball=args.samples, rng_seed=args.seed, slack=args.slack)
    report = check_index(index, args.queries, args.seed, cfg, workers=args.workers)
    emit(
        queries=report.queries,
        completeness_failures=report.completeness_failures,
        completeness_rate=report.completeness_rate,
        soundness_rate=report.soundness_rate,
        sandwich_rate=report.sandwich_rate,
        max_witness_radius=report.max_witness_radius,
        eps=index.params.eps,
    )
    return 1 if report.completeness_failures else 0
