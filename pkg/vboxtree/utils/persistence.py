"""Versioned text container for a built index.

    VBOXTREE 1
    dim <d>
    eps <real>
    delta <real>
    scale <real>
    margin <real>
    bbox <center...> <half_extents...>
    sites <n>
    <n coordinate lines>
    mainnodes <count>
    N <leaf|internal> <center...> <half_extents...> <angles...> [sites: k i1..ik] [aux: m]
    ...

Records are in preorder; the auxiliary trees of a leaf follow it inline in
orientation order. Reals carry 17 significant digits so doubles round-trip.
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Union

from vboxtree.utils.auxtree import AuxList
from vboxtree.utils.boxtree import AnnIndex, BoxTreeNode, refresh_stats
from vboxtree.utils.cells import SiteSet
from vboxtree.utils.errors import IndexFormatError
from vboxtree.utils.geometry import OrientedBox, Rotation, axis_box
from vboxtree.utils.schema import BuildParams, BuildStats

logger = logging.getLogger(__name__)

MAGIC = "VBOXTREE"
VERSION = 1


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _fmts(xs) -> str:
    return " ".join(_fmt(x) for x in xs)


def _node_line(node: BoxTreeNode) -> str:
    box = node.box
    parts = [
        "N",
        "leaf" if node.is_leaf else "internal",
        _fmts(box.center),
        _fmts(box.half_extents),
    ]
    if box.rotation.angles:
        parts.append(_fmts(box.rotation.angles))
    if node.is_leaf:
        parts.append(f"sites: {len(node.site_set)}")
        if node.site_set:
            parts.append(" ".join(str(i) for i in node.site_set))
        if node.aux is not None:
            parts.append(f"aux: {len(node.aux)}")
    return " ".join(parts)


def _write_tree(node: BoxTreeNode, out: List[str]) -> None:
    out.append(_node_line(node))
    if node.is_leaf:
        if node.aux is not None:
            for tree in node.aux.trees:
                _write_tree(tree, out)
        return
    for child in node.children:
        _write_tree(child, out)


def dumps(index: AnnIndex) -> str:
    index.materialize()
    p = index.params
    bb = index.bounding_box
    lines = [
        f"{MAGIC} {VERSION}",
        f"dim {index.dim}",
        f"eps {_fmt(p.eps)}",
        f"delta {_fmt(p.delta)}",
        f"scale {_fmt(p.scale_factor)}",
        f"margin {_fmt(p.margin_factor)}",
        f"bbox {_fmts(bb.center)} {_fmts(bb.half_extents)}",
        f"sites {index.sites.n}",
    ]
    lines.extend(_fmts(row) for row in index.sites.points)
    lines.append(f"mainnodes {index.stats.main_nodes}")
    _write_tree(index.root, lines)
    return "\n".join(lines) + "\n"


def save_index(index: AnnIndex, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(index), encoding="utf-8")
    logger.info("wrote index to %s", path)


class _Reader:
    def __init__(self, text: str):
        self._lines = [line for line in text.splitlines() if line.strip()]
        self._pos = 0

    def next(self) -> List[str]:
        if self._pos >= len(self._lines):
            raise IndexFormatError("unexpected end of index file")
        self._pos += 1
        return self._lines[self._pos - 1].split()

    def keyed(self, key: str) -> List[str]:
        tokens = self.next()
        if tokens[0] != key:
            raise IndexFormatError(f"line {self._pos}: expected {key!r}, got {tokens[0]!r}")
        return tokens[1:]

    def peek_key(self) -> Optional[str]:
        if self._pos >= len(self._lines):
            return None
        return self._lines[self._pos].split()[0]

    @property
    def line(self) -> int:
        return self._pos


def _floats(tokens: List[str], reader: _Reader) -> List[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise IndexFormatError(f"line {reader.line}: malformed number")


def _read_tree(reader: _Reader, d: int, depth: int, counter: List[int]) -> BoxTreeNode:
    tokens = reader.keyed("N")
    if not tokens or tokens[0] not in ("leaf", "internal"):
        raise IndexFormatError(f"line {reader.line}: expected node kind")
    kind, rest = tokens[0], tokens[1:]
    nums = _floats(rest[: 3 * d - 1], reader)
    if len(nums) != 3 * d - 1:
        raise IndexFormatError(f"line {reader.line}: truncated node record")
    box = OrientedBox(nums[:d], nums[d : 2 * d], Rotation(tuple(nums[2 * d :])))
    rest = rest[3 * d - 1 :]
    counter[0] += 1

    node = BoxTreeNode(box=box, depth=depth)
    if kind == "internal":
        node.children = [_read_tree(reader, d, depth + 1, counter) for _ in range(1 << d)]
        return node

    n_aux = None
    try:
        if rest[:1] == ["sites:"]:
            k = int(rest[1])
            node.site_set = tuple(int(t) for t in rest[2 : 2 + k])
            rest = rest[2 + k :]
        if rest[:1] == ["aux:"]:
            n_aux = int(rest[1])
    except (IndexError, ValueError):
        raise IndexFormatError(f"line {reader.line}: malformed leaf record")
    if n_aux is not None:
        aux = AuxList()
        for _ in range(n_aux):
            tree = _read_tree(reader, d, 0, [0])
            aux.orientations.append(tree.box.rotation)
            aux.trees.append(tree)
        node.aux = aux
    return node


def loads(text: str) -> AnnIndex:
    reader = _Reader(text)
    header = reader.next()
    if header != [MAGIC, str(VERSION)]:
        raise IndexFormatError(f"not a {MAGIC} {VERSION} file")
    d = int(reader.keyed("dim")[0])
    eps = float(reader.keyed("eps")[0])
    delta = float(reader.keyed("delta")[0])
    scale = float(reader.keyed("scale")[0])
    margin = None
    if reader.peek_key() == "margin":
        margin = float(reader.keyed("margin")[0])
    bbox = _floats(reader.keyed("bbox"), reader)
    if len(bbox) != 2 * d:
        raise IndexFormatError("bbox needs 2d reals")
    n = int(reader.keyed("sites")[0])
    sites = SiteSet([_floats(reader.next(), reader) for _ in range(n)])
    if sites.dim != d:
        raise IndexFormatError(f"sites are {sites.dim}-d, header says {d}")

    expected = int(reader.keyed("mainnodes")[0])
    counter = [0]
    root = _read_tree(reader, d, 0, counter)
    if counter[0] != expected:
        raise IndexFormatError(f"mainnodes says {expected}, read {counter[0]}")

    values = dict(eps=eps, delta=delta, scale_factor=scale)
    if margin is not None:
        values["margin_factor"] = margin
    bb = axis_box(bbox[:d], bbox[d:])
    side = 2.0 * float(bb.half_extents[0])
    # V/delta is a power of 2^d by construction
    k = round(math.log2(side ** d / delta) / d)
    index = AnnIndex(
        dim=d,
        params=BuildParams(**values),
        sites=sites,
        bounding_box=bb,
        root=root,
        stats=BuildStats(volume_ratio=float(2 ** (d * k))),
    )
    refresh_stats(index)
    return index


def load_index(path: Union[str, Path]) -> AnnIndex:
    return loads(Path(path).read_text(encoding="utf-8"))
