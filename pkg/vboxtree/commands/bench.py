import argparse
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Tuple

import numpy as np

from vboxtree.config import MAX_HASH_CELLS
from vboxtree.utils.boxtree import AnnIndex, enable_hash_locate
from vboxtree.utils.index import nodes_visited_bound, query, random_interior_points
from vboxtree.utils.persistence import load_index
from vboxtree.utils.schema import BenchReport, QueryResult
from vboxtree.commands.common import emit


def add_parser(subparsers):
    parser = subparsers.add_parser("bench", help="Time queries and check the visit bound")
    parser.add_argument("index", help="Index file")
    parser.add_argument("--queries", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1, help="Query threads")
    parser.add_argument("--hash-locate", action="store_true")
    parser.set_defaults(handler=handle)
    return parser


def _timed(index: AnnIndex, q: np.ndarray) -> Tuple[QueryResult, float]:
    start = time.perf_counter()
    result = query(index, q)
    return result, (time.perf_counter() - start) * 1e6


def run_bench(index: AnnIndex, queries: int, seed: int, workers: int = 1) -> BenchReport:
    points = random_interior_points(index, queries, seed)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            timed = list(pool.map(lambda q: _timed(index, q), points))
    else:
        timed = [_timed(index, q) for q in points]

    nodes = np.array([r.nodes_visited for r, _ in timed])
    lists = np.array([r.lists_traversed for r, _ in timed])
    micros = np.array([t for _, t in timed])
    bound = nodes_visited_bound(index)
    return BenchReport(
        queries=queries,
        node_bound=bound,
        violations=int(np.count_nonzero(nodes > bound)),
        mean_nodes=float(nodes.mean()),
        median_nodes=float(np.median(nodes)),
        p99_nodes=float(np.percentile(nodes, 99)),
        max_nodes=int(nodes.max()),
        mean_lists=float(lists.mean()),
        mean_us=float(micros.mean()),
        median_us=float(np.median(micros)),
        p99_us=float(np.percentile(micros, 99)),
    )


def handle(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    if args.hash_locate:
        enable_hash_locate(index, MAX_HASH_CELLS)
    report = run_bench(index, args.queries, args.seed, args.workers)
    emit(**report.model_dump())
    return 1 if report.violations else 0
