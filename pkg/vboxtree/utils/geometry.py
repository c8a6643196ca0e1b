"""Points, plane-rotation orientations and oriented hyperboxes.

Boxes are stored as a center, local half side lengths and a rotation whose
columns are the box axes, so a point x has local coordinates R^T (x - c).
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from vboxtree.config import DEFAULT_MAX_DIM, TOLERANCE
from vboxtree.utils.errors import CapacityError, DimensionMismatchError

Point = np.ndarray


@lru_cache(maxsize=None)
def _child_signs(d: int) -> np.ndarray:
    """Row k holds +1 on the axes whose bit is set in k, -1 elsewhere."""
    k = np.arange(1 << d)[:, None]
    signs = np.where(k >> np.arange(d) & 1, 1.0, -1.0)
    signs.setflags(write=False)
    return signs


@lru_cache(maxsize=None)
def _bit_weights(d: int) -> np.ndarray:
    return 1 << np.arange(d)


def as_point(coords: Iterable[float], dim: int = None) -> Point:
    """Return `coords` as a read-only float vector, checking arity and finiteness."""
    p = np.array(coords, dtype=float).reshape(-1)
    if p.size == 0:
        raise DimensionMismatchError("a point needs at least one coordinate")
    if dim is not None and p.size != dim:
        raise DimensionMismatchError(f"expected {dim} coordinates, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point has non-finite coordinates: {p.tolist()}")
    p.setflags(write=False)
    return p


def rotation_matrix(angles: Sequence[float], dim: int = None) -> np.ndarray:
    """Ordered product G(1,2)(a1) G(2,3)(a2) ... G(d-1,d)(a_{d-1}) of plane rotations."""
    angles = [float(a) for a in angles]
    d = len(angles) + 1 if dim is None else dim
    if len(angles) != d - 1:
        raise DimensionMismatchError(f"{d}-d rotation needs {d - 1} angles, got {len(angles)}")
    if not all(np.isfinite(angles)):
        raise ValueError("rotation angles must be finite")
    m = np.eye(d)
    for i, theta in enumerate(angles):
        if theta == 0.0:
            continue
        g = np.eye(d)
        c, s = np.cos(theta), np.sin(theta)
        g[i, i], g[i, i + 1] = c, -s
        g[i + 1, i], g[i + 1, i + 1] = s, c
        m = m @ g
    return m


@dataclass(frozen=True)
class Rotation:
    angles: Tuple[float, ...]

    @classmethod
    def identity(cls, dim: int) -> "Rotation":
        return cls(tuple(0.0 for _ in range(dim - 1)))

    @property
    def dim(self) -> int:
        return len(self.angles) + 1

    @property
    def is_identity(self) -> bool:
        return not any(self.angles)

    @cached_property
    def matrix(self) -> np.ndarray:
        m = rotation_matrix(self.angles)
        m.setflags(write=False)
        return m

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class OrientedBox:
    center: Point
    half_extents: np.ndarray
    rotation: Rotation = field(default=None)

    def __post_init__(self):
        center = as_point(self.center)
        half = np.array(self.half_extents, dtype=float).reshape(-1)
        if half.size != center.size:
            raise DimensionMismatchError(
                f"center has {center.size} coordinates, half extents {half.size}"
            )
        if not np.all(half > 0) or not np.all(np.isfinite(half)):
            raise ValueError(f"half extents must be positive and finite: {half.tolist()}")
        half.setflags(write=False)
        rotation = self.rotation or Rotation.identity(center.size)
        if rotation.dim != center.size:
            raise DimensionMismatchError(
                f"rotation is {rotation.dim}-d but box is {center.size}-d"
            )
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "half_extents", half)
        object.__setattr__(self, "rotation", rotation)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def volume(self) -> float:
        return box_volume(self)

    @property
    def diagonal(self) -> float:
        return float(2.0 * np.linalg.norm(self.half_extents))

    def to_local(self, x: np.ndarray) -> np.ndarray:
        """Local coordinates of one point (d,) or many points (m, d)."""
        offset = np.asarray(x, dtype=float) - self.center
        if self.rotation.is_identity:
            return offset
        return offset @ self.rotation.matrix

    def corners(self) -> np.ndarray:
        signs = np.array(list(product((-1.0, 1.0), repeat=self.dim)))
        return self.center + (signs * self.half_extents) @ self.rotation.matrix.T

    def linear_range(self, a: np.ndarray) -> Tuple[float, float]:
        """Minimum and maximum of a.x over the box."""
        mid = float(a @ self.center)
        spread = float(np.abs(a @ self.rotation.matrix) @ self.half_extents)
        return mid - spread, mid + spread

    def contains_many(self, xs: np.ndarray, tol: float = TOLERANCE) -> np.ndarray:
        local = self.to_local(np.atleast_2d(xs))
        return np.all(np.abs(local) <= self.half_extents + tol, axis=1)

    @classmethod
    def _trusted(cls, center: np.ndarray, half: np.ndarray, rotation: Rotation) -> "OrientedBox":
        """Skip validation for parts derived from an already valid box."""
        box = object.__new__(cls)
        object.__setattr__(box, "center", center)
        object.__setattr__(box, "half_extents", half)
        object.__setattr__(box, "rotation", rotation)
        return box

    def child_index(self, x: np.ndarray) -> int:
        """Child containing x under the lower-closed, upper-open convention."""
        return int((self.to_local(x) >= 0.0) @ _bit_weights(self.dim))

    def child(self, index: int) -> "OrientedBox":
        return self.children()[index]

    def children(self) -> List["OrientedBox"]:
        """All 2^d children; child k lies on the upper side of axis i when bit i of k is set."""
        half = self.half_extents / 2.0
        half.setflags(write=False)
        offsets = _child_signs(self.dim) * half
        if not self.rotation.is_identity:
            offsets = offsets @ self.rotation.matrix.T
        centers = self.center + offsets
        centers.setflags(write=False)
        return [OrientedBox._trusted(c, half, self.rotation) for c in centers]

    def reoriented(self, rotation: Rotation) -> "OrientedBox":
        return OrientedBox(self.center, self.half_extents, rotation)


def axis_box(center: Sequence[float], half_extents) -> OrientedBox:
    center = as_point(center)
    half = np.broadcast_to(np.asarray(half_extents, dtype=float), center.shape)
    return OrientedBox(center, half.copy())


def box_contains(b: OrientedBox, x: Point, tol: float = TOLERANCE) -> bool:
    x = np.asarray(x, dtype=float)
    if x.shape != (b.dim,):
        raise DimensionMismatchError(f"point is {x.size}-d but box is {b.dim}-d")
    return bool(np.all(np.abs(b.to_local(x)) <= b.half_extents + tol))


def box_scale(b: OrientedBox, s: float) -> OrientedBox:
    if not s > 0:
        raise ValueError(f"scale factor must be positive, got {s}")
    return OrientedBox(b.center, b.half_extents * s, b.rotation)


def box_subdivide(b: OrientedBox, max_dim: int = DEFAULT_MAX_DIM) -> List[OrientedBox]:
    """The 2^d children cut by the hyperplanes bisecting every local axis.

    Child k has bit i of k set when it lies on the upper side of axis i.
    """
    if b.dim > max_dim:
        raise CapacityError(f"refusing 2^{b.dim} fan-out (max_dim={max_dim})")
    return b.children()


def box_volume(b: OrientedBox) -> float:
    return float(np.prod(2.0 * b.half_extents))
