"""Uniform grid over the bounding box at the deepest main-tree level, keyed by
quantized coordinates, mapping each cell straight to its leaf."""

import logging
from itertools import product
from typing import Dict, Optional, Tuple

import numpy as np

from vboxtree.utils.boxtree import BoxTreeNode
from vboxtree.utils.geometry import OrientedBox

logger = logging.getLogger(__name__)

CellKey = Tuple[int, ...]


class GridHash:
    def __init__(self, lower: np.ndarray, cell: float, per_axis: int, table: Dict[CellKey, BoxTreeNode]):
        self.lower = lower
        self.cell = cell
        self.per_axis = per_axis
        self.table = table
        # rounding allowance for leaf faces, relative to the coordinate magnitude
        self.guard = 1e-9 * (float(np.abs(lower).max()) + cell * per_axis)

    def __len__(self) -> int:
        return len(self.table)

    @classmethod
    def from_tree(
        cls, root: BoxTreeNode, bb: OrientedBox, depth: int, max_cells: int
    ) -> Optional["GridHash"]:
        d = bb.dim
        per_axis = 1 << depth
        if per_axis ** d > max_cells:
            logger.warning(
                "grid overlay needs %d cells (limit %d); hashed location disabled",
                per_axis ** d,
                max_cells,
            )
            return None

        table: Dict[CellKey, BoxTreeNode] = {}
        stack = [(root, (0,) * d)]
        while stack:
            node, pos = stack.pop()
            if node.children is not None:
                for k, child in enumerate(node.children):
                    stack.append((child, tuple(2 * p + (k >> i & 1) for i, p in enumerate(pos))))
                continue
            span = 1 << (depth - node.depth)
            base = [p * span for p in pos]
            for offset in product(range(span), repeat=d):
                table[tuple(b + o for b, o in zip(base, offset))] = node

        lower = bb.center - bb.half_extents
        cell = 2.0 * float(bb.half_extents[0]) / per_axis
        logger.debug("grid overlay: %d cells of side %g", len(table), cell)
        return cls(lower, cell, per_axis, table)

    def key(self, q: np.ndarray) -> CellKey:
        idx = np.floor((q - self.lower) / self.cell).astype(int)
        return tuple(np.clip(idx, 0, self.per_axis - 1).tolist())

    def lookup(self, q: np.ndarray) -> Optional[BoxTreeNode]:
        """Leaf holding q, or None when q is missing from the table or lies
        within `guard` of a face of the hashed leaf.

        Floor quantisation and descent round differently on cut planes, so
        only points clear of every face are answered from the table.
        """
        leaf = self.table.get(self.key(q))
        if leaf is None:
            return None
        margin = leaf.box.half_extents - np.abs(leaf.box.to_local(q))
        if np.any(margin <= self.guard):
            return None
        return leaf
