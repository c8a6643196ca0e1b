import math

import numpy as np
import pytest

from vboxtree.utils.cells import SiteSet
from vboxtree.utils.index import build
from vboxtree.utils.schema import BuildOptions

PLANE_EPS = math.pi / 8


def uniform_sites(n: int, d: int, seed: int) -> SiteSet:
    """n uniform sites in the unit cube."""
    return SiteSet(np.random.default_rng(seed).uniform(size=(n, d)))


def brute_nearest(S: SiteSet, q: np.ndarray) -> int:
    return int(np.argmin(np.linalg.norm(S.points - q, axis=1)))


@pytest.fixture(scope="session")
def plane_sites() -> SiteSet:
    return uniform_sites(12, 2, seed=7)


@pytest.fixture(scope="session")
def plane_index(plane_sites):
    """Eagerly built 2-d index; eps = pi/8 gives 7 auxiliary orientations."""
    return build(plane_sites, PLANE_EPS, BuildOptions(margin=0.25))


@pytest.fixture(scope="session")
def hashed_plane_index(plane_sites):
    return build(plane_sites, PLANE_EPS, BuildOptions(margin=0.25, hash_locate=True))


@pytest.fixture(scope="session")
def two_site_index():
    """Sites (0,0) and (2,0) with eps 0.1; auxiliary lists built on demand."""
    return build([[0.0, 0.0], [2.0, 0.0]], 0.1, BuildOptions(lazy_aux=True))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
