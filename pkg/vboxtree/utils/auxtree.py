"""Auxiliary box trees: for a multi-site main leaf, one tree per discrete
orientation, each over the leaf box scaled about its center and rotated."""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from vboxtree.utils.analysis import angle_steps
from vboxtree.utils.boxtree import BoxTreeNode, Grower, descend, grow_tree, is_small
from vboxtree.utils.cells import SiteSet, nearby_candidates
from vboxtree.utils.geometry import OrientedBox, Rotation, box_contains, box_scale
from vboxtree.utils.schema import BuildParams, BuildStats

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class AuxList:
    orientations: List[Rotation] = field(default_factory=list)
    trees: List[BoxTreeNode] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self) -> Iterator[Tuple[Rotation, BoxTreeNode]]:
        return iter(zip(self.orientations, self.trees))


class AuxHit(NamedTuple):
    orientation: Rotation
    site_set: Tuple[int, ...]
    leaf: BoxTreeNode
    visited: int


def enumerate_orientations(eps: float, d: int) -> List[Tuple[float, ...]]:
    """Nonzero angle vectors with coordinates in {0, eps, 2 eps, ...} below pi,
    in lexicographic order."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if eps >= np.pi:
        logger.warning("eps=%g >= pi leaves no auxiliary orientation", eps)
        return []
    steps = range(angle_steps(eps))
    return [
        tuple(k * eps for k in ks)
        for ks in product(steps, repeat=d - 1)
        if any(ks)
    ]


@lru_cache(maxsize=16)
def orientations_for(eps: float, d: int) -> Tuple[Rotation, ...]:
    return tuple(Rotation(angles) for angles in enumerate_orientations(eps, d))


def build_aux_list(
    leaf_box: OrientedBox,
    site_candidates: Sequence[int],
    S: SiteSet,
    params: BuildParams,
    stats: Optional[BuildStats] = None,
    orientations: Optional[Sequence[Rotation]] = None,
    grower: Optional[Grower] = None,
) -> AuxList:
    """One tree per orientation over the scaled leaf box; with a `grower` each
    tree is grown on first descent."""
    if len(site_candidates) < 2:
        raise ValueError("auxiliary trees are only built for multi-site leaves")
    if not is_small(leaf_box, params.delta):
        raise ValueError("auxiliary trees are only built below the volume tolerance")
    if orientations is None:
        orientations = orientations_for(params.eps, leaf_box.dim)

    scaled = box_scale(leaf_box, params.scale_factor)
    # Same extent for every orientation, so one candidate pool serves them all.
    pool = nearby_candidates(S, scaled)
    aux = AuxList()
    for rotation in orientations:
        root_box = scaled.reoriented(rotation)
        aux.orientations.append(rotation)
        aux.trees.append(grow_tree(root_box, pool, S, params, stats, grower=grower))
    return aux


def locate_aux_leaves(aux: AuxList, q) -> List[AuxHit]:
    """Leaf site sets of every auxiliary tree whose root holds q."""
    q = np.asarray(q, dtype=float)
    hits = []
    for rotation, tree in aux:
        if not box_contains(tree.box, q):
            continue
        leaf, visited = descend(tree, q)
        hits.append(AuxHit(rotation, leaf.site_set, leaf, visited))
    return hits
