import argparse

from vboxtree.utils.oracle import run_cardinality_experiment
from vboxtree.commands.common import emit_record


def add_parser(subparsers):
    parser = subparsers.add_parser("experiment", help="Expected |S'| for uniform sites in the unit ball")
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--eps", type=float, default=0.1)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.set_defaults(handler=handle)
    return parser


def handle(args: argparse.Namespace) -> int:
    report = run_cardinality_experiment(args.n, args.dim, args.eps, args.trials, args.seed)
    for rec in report.records:
        emit_record(**rec.model_dump())
    emit_record(
        summary=True,
        n=report.n,
        d=report.d,
        eps=report.eps,
        r=report.r,
        predicted=report.predicted,
        measured_mean=report.measured_mean,
        ratio=report.ratio,
        trials=report.trials,
    )
    return 0
