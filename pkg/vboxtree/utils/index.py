"""End-to-end build and query."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from vboxtree.utils.analysis import orientation_count, query_node_bound
from vboxtree.utils.auxtree import AuxHit, locate_aux_leaves
from vboxtree.utils.boxtree import AnnIndex, BoxTreeNode, build_main_tree, descend, make_params
from vboxtree.utils.cells import SiteSet, nearest_site
from vboxtree.utils.geometry import as_point, box_contains
from vboxtree.utils.schema import BuildOptions, QueryResult, QueryStats

logger = logging.getLogger(__name__)


def build(S: Union[SiteSet, Sequence], eps: float, options: Optional[BuildOptions] = None) -> AnnIndex:
    options = options or BuildOptions()
    if not isinstance(S, SiteSet):
        S = SiteSet(S)
    params = make_params(
        eps, S.dim, margin=options.margin, scale=options.scale, max_dim=options.max_dim
    )
    return build_main_tree(S, params, options)


def locate(index: AnnIndex, q: np.ndarray) -> Tuple[Optional[BoxTreeNode], int]:
    """Main leaf holding q and nodes visited; (None, 0) outside the bounding box."""
    if not box_contains(index.bounding_box, q):
        return None, 0
    if index.grid is not None:
        leaf = index.grid.lookup(q)
        if leaf is not None:
            return leaf, 1
    return descend(index.root, q)


def collect_site_sets(index: AnnIndex, q) -> Tuple[Optional[BoxTreeNode], List[AuxHit], int, int]:
    """Main leaf, auxiliary hits, nodes visited and lists traversed for q."""
    q = as_point(q, index.dim)
    leaf, visited = locate(index, q)
    if leaf is None or len(leaf.site_set) <= 1:
        return leaf, [], visited, 0
    aux = index.aux_for(leaf)
    if aux is None:
        return leaf, [], visited, 0
    hits = locate_aux_leaves(aux, q)
    return leaf, hits, visited + sum(hit.visited for hit in hits), len(aux)


def query(index: AnnIndex, q) -> QueryResult:
    """The set S' for q: intersection of the site sets of every box holding q."""
    q = as_point(q, index.dim)
    leaf, hits, visited, lists = collect_site_sets(index, q)

    if leaf is None:
        logger.debug("exterior query %s answered exactly", q.tolist())
        return QueryResult(
            s_prime=[nearest_site(q, index.sites)], exact=True, exterior=True
        )
    if len(leaf.site_set) == 1:
        return QueryResult(s_prime=list(leaf.site_set), exact=True, nodes_visited=visited)

    s_prime = np.asarray(leaf.site_set, dtype=int)
    for hit in hits:
        s_prime = np.intersect1d(s_prime, hit.site_set, assume_unique=True)
    if s_prime.size == 0:
        logger.warning("empty intersection at %s; returning the main leaf sites", q.tolist())
        s_prime = np.asarray(leaf.site_set, dtype=int)

    return QueryResult(
        s_prime=s_prime.tolist(),
        exact=s_prime.size == 1,
        nodes_visited=visited,
        lists_traversed=lists,
    )


def nodes_visited_bound(index: AnnIndex) -> int:
    p = index.params
    return query_node_bound(index.stats.volume_ratio, p.eps, index.dim, p.scale_factor)


def query_stats(index: AnnIndex, q) -> QueryStats:
    result = query(index, q)
    return QueryStats(
        nodes_visited=result.nodes_visited,
        lists_traversed=result.lists_traversed,
        node_bound=nodes_visited_bound(index),
        list_bound=max(0, orientation_count(index.params.eps, index.dim)),
    )


def query_many(index: AnnIndex, points, workers: int = 1) -> List[QueryResult]:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if workers <= 1:
        return [query(index, q) for q in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda q: query(index, q), points))


def random_interior_points(index: AnnIndex, count: int, seed: int) -> np.ndarray:
    """Uniform points in the bounding box."""
    rng = np.random.default_rng(seed)
    bb = index.bounding_box
    return bb.center + rng.uniform(-1.0, 1.0, size=(count, index.dim)) * bb.half_extents
