"""Implicit Voronoi-cell predicates.

No diagram is built: the cell of site i is the intersection of the bisector
halfspaces 2(s_t - s_i).x <= |s_t|^2 - |s_i|^2, and "cell i meets box b" is
a small linear feasibility problem over those halfspaces and the box.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import cKDTree

from vboxtree.config import TOLERANCE
from vboxtree.utils.errors import (
    DimensionMismatchError,
    DuplicateSiteError,
    EmptySiteSetError,
)
from vboxtree.utils.geometry import OrientedBox
from vboxtree.utils.schema import BuildStats

logger = logging.getLogger(__name__)

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class SiteSet:
    """The input sites; row i is site i."""

    def __init__(self, points):
        arr = np.array(points, dtype=float)
        if arr.size == 0:
            raise EmptySiteSetError("no points")
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"sites must form an (n, d) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sites have non-finite coordinates")

        _, first, counts = np.unique(arr, axis=0, return_index=True, return_counts=True)
        if np.any(counts > 1):
            dup = arr[first[np.argmax(counts > 1)]]
            same = np.flatnonzero(np.all(arr == dup, axis=1))
            raise DuplicateSiteError(
                f"sites {same[0]} and {same[1]} coincide at {dup.tolist()}"
            )

        arr.setflags(write=False)
        self.points = arr
        self.sq_norms = np.einsum("ij,ij->i", arr, arr)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i) -> np.ndarray:
        return self.points[i]

    def all_indices(self) -> List[int]:
        return list(range(self.n))

    @cached_property
    def kdtree(self) -> cKDTree:
        return cKDTree(self.points)


@dataclass(frozen=True)
class Halfspace:
    """{x : normal . x <= offset}"""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=float).reshape(-1)
        if not np.any(normal):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))


def bisector(S: SiteSet, i: int, t: int) -> Halfspace:
    """Points at least as close to site i as to site t."""
    return Halfspace(2.0 * (S[t] - S[i]), S.sq_norms[t] - S.sq_norms[i])


def nearest_site(q, S: SiteSet) -> int:
    """Index of a nearest site; ties go to the smallest index."""
    if S.n == 0:
        raise EmptySiteSetError("no sites")
    q = np.asarray(q, dtype=float)
    if q.shape != (S.dim,):
        raise DimensionMismatchError(f"query is {q.size}-d but sites are {S.dim}-d")
    diff = S.points - q
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def _min_violation(A: np.ndarray, b: np.ndarray, bounds) -> Optional[float]:
    """min t subject to A x - t <= b with unit rows, or None if the solver fails."""
    m, d = A.shape
    c = np.zeros(d + 1)
    c[-1] = 1.0
    res = linprog(
        c,
        A_ub=np.hstack([A, -np.ones((m, 1))]),
        b_ub=b,
        bounds=list(bounds) + [(-1.0, None)],
        method="highs",
        options=_HIGHS_OPTIONS,
    )
    if res.status != 0:
        logger.warning("feasibility LP did not solve (status %s): %s", res.status, res.message)
        return None
    return float(res.fun)


def lp_feasible(halfspaces: Sequence[Halfspace], d: int, tol: float = TOLERANCE) -> bool:
    """True iff the halfspaces have a common point, up to `tol` in distance units."""
    if not halfspaces:
        return True
    A = np.array([h.normal for h in halfspaces], dtype=float)
    if A.shape[1] != d:
        raise DimensionMismatchError(f"halfspaces are {A.shape[1]}-d, expected {d}")
    b = np.array([h.offset for h in halfspaces], dtype=float)
    norms = np.linalg.norm(A, axis=1)
    worst = _min_violation(A / norms[:, None], b / norms, [(None, None)] * d)
    # Solver failure over-includes; dropping a site would be worse.
    return True if worst is None else worst <= tol


def cell_box_intersects(
    i: int,
    S: SiteSet,
    b: OrientedBox,
    candidates: Iterable[int],
    tol: float = TOLERANCE,
    stats: Optional[BuildStats] = None,
) -> bool:
    """Whether some point of the closed box is at least as close to site i as
    to every other candidate site."""
    candidates = _checked_candidates(S, b, candidates)
    row = np.searchsorted(candidates, i)
    if row == candidates.size or candidates[row] != i:
        raise ValueError(f"site {i} is not among the candidates")
    return bool(_meeting_cells(S, b, candidates, tol, stats, rows=np.array([row]))[0])


def _checked_candidates(S: SiteSet, b: OrientedBox, candidates: Iterable[int]) -> np.ndarray:
    candidates = np.unique(np.fromiter(candidates, dtype=int))
    if candidates.size == 0:
        raise EmptySiteSetError("empty candidate set")
    if b.dim != S.dim:
        raise DimensionMismatchError(f"box is {b.dim}-d but sites are {S.dim}-d")
    return candidates


def _corner_signs(d: int) -> np.ndarray:
    return np.array(list(product((-1.0, 1.0), repeat=d)))


def _meeting_cells(
    S: SiteSet,
    b: OrientedBox,
    candidates: np.ndarray,
    tol: float,
    stats: Optional[BuildStats],
    rows: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Mask over `rows` (positions in `candidates`) of the cells that meet b.

    Everything is done in the box frame u = R^T (x - c), where the bisector
    of sites i and t reads f(u) = 2 (L_t - L_i).u + |L_i|^2 - |L_t|^2 <= 0.
    """
    k = candidates.size
    rows = np.arange(k) if rows is None else rows
    if k == 1:
        return np.ones(rows.size, dtype=bool)

    h = b.half_extents
    L = b.to_local(S.points[candidates])
    sq = np.einsum("ij,ij->i", L, L)
    Lr = L[rows]

    diff = 2.0 * (L[None, :, :] - Lr[:, None, :])
    gap = sq[rows, None] - sq[None, :]
    norms = np.linalg.norm(diff, axis=2)
    norms[np.arange(rows.size), rows] = np.inf
    spread = np.abs(diff) @ h

    inside = np.all(np.abs(Lr) <= h + tol, axis=1)
    # whole box beyond some bisector
    beyond = np.any((gap - spread) / norms > tol, axis=1)

    # the box point closest to the site is often a witness
    nearest = np.clip(Lr, -h, h)
    witness = np.all((np.einsum("rkd,rd->rk", diff, nearest) + gap) / norms <= tol, axis=1)

    # owners of the center and corners
    samples = np.vstack([np.zeros(h.size), _corner_signs(h.size) * h])
    owners = np.zeros(k, dtype=bool)
    owners[np.argmin(((samples[:, None, :] - L[None, :, :]) ** 2).sum(axis=2), axis=1)] = True

    # bisectors the whole box already satisfies drop out
    active = gap + spread > 0.0
    few = np.count_nonzero(active, axis=1) <= 1

    meets = inside | owners[rows] | (~beyond & (witness | few))
    bounds = [(-e, e) for e in h]
    for r in np.flatnonzero(~meets & ~beyond):
        if stats is not None:
            stats.lp_solves += 1
        act = active[r]
        n = norms[r, act]
        worst = _min_violation(diff[r, act] / n[:, None], -gap[r, act] / n, bounds)
        meets[r] = worst is None or worst <= tol
    return meets


def sites_in_box(
    S: SiteSet,
    b: OrientedBox,
    candidates: Sequence[int],
    tol: float = TOLERANCE,
    stats: Optional[BuildStats] = None,
) -> List[int]:
    """Sorted indices of the candidates whose cells meet the box.

    Valid whenever `candidates` contains every site whose cell meets `b`.
    """
    candidates = _checked_candidates(S, b, candidates)
    if stats is not None:
        stats.feasibility_calls += int(candidates.size)
    return candidates[_meeting_cells(S, b, candidates, tol, stats)].tolist()


def nearby_candidates(S: SiteSet, b: OrientedBox, pool: Optional[Sequence[int]] = None) -> List[int]:
    """Sites that can possibly own a point of `b`.

    Every point of b has a site within |x - c| + m <= diag/2 + m, where m is
    the distance from the center c to its nearest site, so owners lie within
    diag + m of c.
    """
    pool = np.arange(S.n) if pool is None else np.asarray(sorted(pool), dtype=int)
    dist = np.linalg.norm(S.points[pool] - b.center, axis=1)
    radius = b.diagonal + dist.min()
    return pool[dist <= radius + TOLERANCE].tolist()
