"""2-D SVG rendering of a built index: main leaves, sites and, optionally,
the rotated auxiliary roots of one multi-site leaf."""

from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from vboxtree.utils.boxtree import AnnIndex
from vboxtree.utils.errors import UnsupportedDimensionError
from vboxtree.utils.geometry import OrientedBox


class SvgCanvas:
    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self.body = []

    def group_start(self, css_class: str):
        self.body.append(f'<g class="{css_class}">')

    def group_end(self):
        self.body.append("</g>")

    def rect(self, x: float, y: float, w: float, h: float, fill: str = "none", stroke: str = "#888", width: float = 0.5):
        self.body.append(
            f'<rect x="{x:.3f}" y="{y:.3f}" width="{w:.3f}" height="{h:.3f}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="{width}"/>'
        )

    def polygon(self, points: Iterable[Tuple[float, float]], stroke: str, width: float = 1.0):
        coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in points)
        self.body.append(
            f'<polygon points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width}"/>'
        )

    def circle(self, x: float, y: float, r: float, fill: str = "black"):
        self.body.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r:.3f}" fill="{fill}"/>')

    def get_svg(self) -> str:
        header = (
            '<?xml version="1.0" standalone="no"?>\n'
            f'<svg version="1.1" width="{self.width:.0f}" height="{self.height:.0f}" '
            f'viewBox="0 0 {self.width:.3f} {self.height:.3f}" xmlns="http://www.w3.org/2000/svg">'
        )
        return "\n".join([header] + self.body + ["</svg>"]) + "\n"


def render_index_svg(index: AnnIndex, leaf: Optional[int] = None, size: float = 800.0) -> str:
    """Render a 2-D index. `leaf` selects the k-th multi-site main leaf (in
    preorder) whose auxiliary roots are outlined."""
    if index.dim != 2:
        raise UnsupportedDimensionError(f"visualization needs d = 2, index is {index.dim}-d")
    index.materialize_tree()

    bb = index.bounding_box
    lower = bb.center - bb.half_extents
    scale = size / (2.0 * float(bb.half_extents[0]))

    def to_svg(p: Sequence[float]) -> Tuple[float, float]:
        # flip y so the picture reads like a plot
        return (p[0] - lower[0]) * scale, size - (p[1] - lower[1]) * scale

    canvas = SvgCanvas(size, size)
    canvas.group_start("leaves")
    multi = []
    for node in index.root.iter_leaves():
        box: OrientedBox = node.box
        x, y = to_svg(box.center - box.half_extents * np.array([1.0, -1.0]))
        w, h = 2.0 * box.half_extents * scale
        if node.is_multi_site:
            multi.append(node)
            canvas.rect(x, y, w, h, fill="#f4a460")
        else:
            canvas.rect(x, y, w, h)
    canvas.group_end()

    if leaf is not None and 0 <= leaf < len(multi):
        aux = index.aux_for(multi[leaf])
        if aux is not None:
            canvas.group_start("aux-roots")
            for tree in aux.trees:
                corners = tree.box.corners()
                # corners come in binary order; walk them around the square
                ring = corners[[0, 1, 3, 2]]
                canvas.polygon([to_svg(c) for c in ring], stroke="#1f77b4")
            canvas.group_end()

    canvas.group_start("sites")
    radius = max(1.5, size / 400.0)
    for p in index.sites.points:
        canvas.circle(*to_svg(p), radius)
    canvas.group_end()
    return canvas.get_svg()
