"""The main box tree: 2^d-ary subdivision of the bounding box down to
single-site boxes or boxes smaller than the volume tolerance delta."""

import logging
import math
import threading
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterator, List, Optional, Tuple

import numpy as np

from vboxtree.config import TOLERANCE
from vboxtree.utils.cells import SiteSet, sites_in_box
from vboxtree.utils.errors import CapacityError, DimensionMismatchError, EmptySiteSetError
from vboxtree.utils.geometry import OrientedBox, axis_box, box_contains, box_subdivide, box_volume
from vboxtree.utils.schema import BuildOptions, BuildParams, BuildStats

if TYPE_CHECKING:
    from vboxtree.utils.auxtree import AuxList
    from vboxtree.utils.gridhash import GridHash

logger = logging.getLogger(__name__)

# A box whose volume is within this relative distance of delta counts as delta.
_VOLUME_GUARD = 1e-12


def compute_delta(eps: float, d: int) -> float:
    if not eps > 0 or d < 1:
        raise ValueError(f"need eps > 0 and d >= 1, got eps={eps}, d={d}")
    return (eps / (2.0 * math.sqrt(d))) ** d


def default_scale(d: int) -> float:
    return max(2.0, math.sqrt(d))


def make_params(
    eps: float,
    d: int,
    margin: Optional[float] = None,
    scale: Optional[float] = None,
    max_dim: Optional[int] = None,
) -> BuildParams:
    values = {"eps": eps, "delta": compute_delta(eps, d), "scale_factor": scale or default_scale(d)}
    if margin is not None:
        values["margin_factor"] = margin
    if max_dim is not None:
        values["max_dim"] = max_dim
    return BuildParams(**values)


def make_bounding_box(S: SiteSet, margin_factor: float, eps: float) -> OrientedBox:
    """Axis-aligned cube around the sites' min/max box, inflated by
    `margin_factor` extents on each side, never narrower than eps."""
    lo, hi = S.points.min(axis=0), S.points.max(axis=0)
    side = max(float(np.max(hi - lo)) * (1.0 + 2.0 * margin_factor), eps)
    return axis_box((lo + hi) / 2.0, side / 2.0)


def pad_to_grid(bb: OrientedBox, eps: float) -> Tuple[OrientedBox, float]:
    """Grow the cube side to (eps / 2 sqrt d) * 2^k so V/delta = 2^(d k).

    Returns the padded box and V/delta.
    """
    d = bb.dim
    unit = eps / (2.0 * math.sqrt(d))
    target = 2.0 * float(bb.half_extents.max())
    side, k = unit, 0
    while side < target:
        side *= 2.0
        k += 1
    return axis_box(bb.center, side / 2.0), float(2 ** (d * k))


@dataclass(eq=False)
class Grower:
    """Grows the children of a box-tree node on first descent.

    One grower serves the main tree and every auxiliary tree of an index; all
    growth happens under its lock.
    """

    S: SiteSet
    params: BuildParams
    stats: Optional[BuildStats] = None
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def grow_child(self, node: "BoxTreeNode", k: int) -> "BoxTreeNode":
        with self.lock:
            child = node.children[k]
            if child is None:
                child = grow_tree(
                    node.box.child(k), list(node.site_set), self.S, self.params, self.stats, node.depth + 1, self
                )
                node.children[k] = child
        return child


@dataclass(eq=False)
class BoxTreeNode:
    box: OrientedBox
    depth: int = 0
    site_set: Tuple[int, ...] = ()
    # None entries are children not grown yet
    children: Optional[List[Optional["BoxTreeNode"]]] = None
    aux: Optional["AuxList"] = None
    grower: Optional[Grower] = None

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    @property
    def is_multi_site(self) -> bool:
        return self.is_leaf and len(self.site_set) >= 2

    @property
    def is_pending(self) -> bool:
        return self.children is not None and any(c is None for c in self.children)

    def child(self, k: int) -> "BoxTreeNode":
        child = self.children[k]
        if child is None:
            child = self.grower.grow_child(self, k)
        return child

    def iter_nodes(self) -> Iterator["BoxTreeNode"]:
        """Every grown node, preorder."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.children:
                stack.extend(c for c in reversed(node.children) if c is not None)

    def iter_leaves(self) -> Iterator["BoxTreeNode"]:
        return (node for node in self.iter_nodes() if node.is_leaf)

    def grow_all(self) -> None:
        stack = [self]
        while stack:
            node = stack.pop()
            if node.children:
                stack.extend(node.child(k) for k in range(len(node.children)))


def is_small(box: OrientedBox, delta: float) -> bool:
    return box_volume(box) < delta * (1.0 - _VOLUME_GUARD)


def grow_tree(
    box: OrientedBox,
    candidates: List[int],
    S: SiteSet,
    params: BuildParams,
    stats: Optional[BuildStats] = None,
    depth: int = 0,
    grower: Optional[Grower] = None,
) -> BoxTreeNode:
    """Box tree over `box`; `candidates` must hold every site whose cell meets it.

    With a `grower` only this node is computed and its children are grown
    on first descent.
    """
    sites = sites_in_box(S, box, candidates, stats=stats)
    if not sites:
        logger.warning("no cell met a box at depth %d; keeping all %d candidates", depth, len(candidates))
        sites = sorted(candidates)
    node = BoxTreeNode(box=box, depth=depth, site_set=tuple(sites))
    if len(sites) <= 1 or is_small(box, params.delta):
        return node
    if grower is not None:
        node.children = [None] * (1 << box.dim)
        node.grower = grower
        return node
    node.children = [
        grow_tree(child, sites, S, params, stats, depth + 1)
        for child in box_subdivide(box, params.max_dim)
    ]
    return node


def descend(node: BoxTreeNode, q: np.ndarray) -> Tuple[BoxTreeNode, int]:
    """Leaf under `node` holding q, and the number of nodes visited."""
    visited = 1
    while node.children is not None:
        node = node.child(node.box.child_index(q))
        visited += 1
    return node, visited


def locate_leaf(node: BoxTreeNode, q) -> Optional[BoxTreeNode]:
    """Leaf containing q, or None when q lies outside `node`'s box."""
    q = np.asarray(q, dtype=float)
    if not box_contains(node.box, q):
        return None
    return descend(node, q)[0]


@dataclass(eq=False)
class AnnIndex:
    dim: int
    params: BuildParams
    sites: SiteSet
    bounding_box: OrientedBox
    root: BoxTreeNode
    stats: BuildStats
    grid: Optional["GridHash"] = None
    lazy_aux: bool = False
    grower: Optional[Grower] = None
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def aux_for(self, leaf: BoxTreeNode) -> Optional["AuxList"]:
        """Auxiliary list of a multi-site leaf, built on first use when lazy."""
        if leaf.aux is None and self.lazy_aux and leaf.is_multi_site:
            with self._lock:
                if leaf.aux is None:
                    _attach_aux(self, leaf)
                    _count_aux(self.stats, leaf.aux)
        return leaf.aux

    def materialize_tree(self) -> None:
        """Grow every main-tree node still waiting for its first descent."""
        if self.grower is None:
            return
        with self._lock:
            self.root.grow_all()
            refresh_stats(self)

    def materialize(self) -> None:
        """Grow everything: main tree, every auxiliary list and every auxiliary tree."""
        if self.grower is None and not self.lazy_aux:
            return
        with self._lock:
            self.root.grow_all()
            for leaf in self.root.iter_leaves():
                if leaf.is_multi_site and leaf.aux is None:
                    _attach_aux(self, leaf)
                if leaf.aux is not None:
                    for tree in leaf.aux.trees:
                        tree.grow_all()
            self.lazy_aux = False
            self.grower = None
            refresh_stats(self)


def _attach_aux(index: AnnIndex, leaf: BoxTreeNode) -> None:
    from vboxtree.utils.auxtree import build_aux_list, orientations_for

    leaf.aux = build_aux_list(
        leaf.box,
        leaf.site_set,
        index.sites,
        index.params,
        stats=index.stats,
        orientations=orientations_for(index.params.eps, index.dim),
        grower=index.grower,
    )


def _count_aux(s: BuildStats, aux: "AuxList") -> None:
    s.aux_lists += 1
    for tree in aux.trees:
        count = depth = 0
        for sub in tree.iter_nodes():
            count += 1
            depth = max(depth, sub.depth)
            if sub.is_leaf:
                s.leaf_site_entries += len(sub.site_set)
            else:
                s.cached_site_entries += len(sub.site_set)
        s.aux_trees += 1
        s.aux_nodes += count
        s.max_aux_depth = max(s.max_aux_depth, depth)
        s.max_aux_nodes = max(s.max_aux_nodes, count)


def refresh_stats(index: AnnIndex) -> BuildStats:
    """Recount the structural statistics of the grown nodes; solver counters
    are left as they are."""
    s = index.stats
    per_depth: List[int] = []
    s.main_nodes = s.main_leaves = s.multi_site_leaves = 0
    s.leaf_site_entries = s.cached_site_entries = 0
    s.aux_lists = s.aux_trees = s.aux_nodes = 0
    s.max_aux_depth = s.max_aux_nodes = 0
    for node in index.root.iter_nodes():
        s.main_nodes += 1
        while len(per_depth) <= node.depth:
            per_depth.append(0)
        per_depth[node.depth] += 1
        if not node.is_leaf:
            s.cached_site_entries += len(node.site_set)
            continue
        s.main_leaves += 1
        s.leaf_site_entries += len(node.site_set)
        if node.is_multi_site:
            s.multi_site_leaves += 1
        if node.aux is not None:
            _count_aux(s, node.aux)
    s.nodes_per_depth = per_depth
    s.max_main_depth = len(per_depth) - 1
    return s


def drop_internal_sites(root: BoxTreeNode) -> None:
    """Clear the site sets of internal nodes; pending nodes keep theirs to grow from."""
    for node in root.iter_nodes():
        if not node.is_leaf and not node.is_pending:
            node.site_set = ()


def build_main_tree(
    S: SiteSet, params: BuildParams, options: Optional[BuildOptions] = None
) -> AnnIndex:
    """Main tree over the padded bounding box, with auxiliary lists on every
    multi-site leaf (deferred when `options.lazy_aux`, and everything below
    the root deferred when `options.lazy_tree`)."""
    options = options or BuildOptions()
    if S.n == 0:
        raise EmptySiteSetError("no sites")
    d = S.dim
    if d > params.max_dim:
        raise CapacityError(f"dimension {d} exceeds max_dim={params.max_dim}")

    bb, ratio = pad_to_grid(make_bounding_box(S, params.margin_factor, params.eps), params.eps)
    stats = BuildStats(volume_ratio=ratio)
    logger.info("building main tree: n=%d d=%d eps=%g V/delta=%g", S.n, d, params.eps, ratio)

    lock = threading.RLock()
    grower = Grower(S, params, stats, lock) if options.lazy_tree else None
    root = grow_tree(bb, S.all_indices(), S, params, stats, grower=grower)
    index = AnnIndex(
        dim=d,
        params=params,
        sites=S,
        bounding_box=bb,
        root=root,
        stats=stats,
        lazy_aux=options.lazy_aux or options.lazy_tree,
        grower=grower,
        _lock=lock,
    )
    if not index.lazy_aux:
        for leaf in root.iter_leaves():
            if leaf.is_multi_site:
                _attach_aux(index, leaf)
    if not options.cache_internal_sites:
        drop_internal_sites(root)
    refresh_stats(index)

    if options.hash_locate:
        enable_hash_locate(index, options.max_hash_cells)

    logger.info(
        "built index: main_nodes=%d multi_site_leaves=%d aux_trees=%d lp_solves=%d",
        stats.main_nodes,
        stats.multi_site_leaves,
        stats.aux_trees,
        stats.lp_solves,
    )
    return index


def enable_hash_locate(index: AnnIndex, max_cells: int) -> bool:
    """Attach the grid overlay; False when it would exceed `max_cells`."""
    from vboxtree.utils.gridhash import GridHash

    index.materialize_tree()
    index.grid = GridHash.from_tree(
        index.root, index.bounding_box, index.stats.max_main_depth, max_cells
    )
    index.stats.hash_cells = len(index.grid) if index.grid is not None else 0
    return index.grid is not None


def grid_hash_locate(index: AnnIndex, q) -> Optional[BoxTreeNode]:
    """Leaf holding q through the grid overlay, descending the tree on a miss.

    None when q lies outside the bounding box.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (index.dim,):
        raise DimensionMismatchError(f"query is {q.size}-d but index is {index.dim}-d")
    if not box_contains(index.bounding_box, q, tol=TOLERANCE):
        return None
    if index.grid is not None:
        leaf = index.grid.lookup(q)
        if leaf is not None:
            return leaf
        logger.debug("grid miss at %s", q.tolist())
    return descend(index.root, q)[0]


def leaf_diagonals(index: AnnIndex) -> List[float]:
    """Main diagonals of every multi-site leaf, main and auxiliary."""
    index.materialize()
    out = []
    for leaf in index.root.iter_leaves():
        if not leaf.is_multi_site:
            continue
        out.append(leaf.box.diagonal)
        if leaf.aux is not None:
            for tree in leaf.aux.trees:
                out.extend(sub.box.diagonal for sub in tree.iter_leaves() if sub.is_multi_site)
    return out
