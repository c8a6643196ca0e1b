"""Ground truth: brute-force nearest neighbours, a sampled S' oracle, the
minimum enclosing ball and the expected-cardinality experiment."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np

from vboxtree.utils.analysis import predicted_cardinality
from vboxtree.utils.boxtree import AnnIndex, refresh_stats
from vboxtree.utils.cells import SiteSet, nearest_site
from vboxtree.utils.index import build, collect_site_sets, query, random_interior_points
from vboxtree.utils.schema import (
    BuildOptions,
    CheckReport,
    ExperimentReport,
    OracleConfig,
    TrialRecord,
)

logger = logging.getLogger(__name__)

# Fixed so that a longer sample stream extends a shorter one with the same seed.
_BATCH = 4096


def sample_ball(center: np.ndarray, radius: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """`count` uniform points of the closed ball, by rejection from its cube."""
    center = np.asarray(center, dtype=float)
    d = center.size
    out: List[np.ndarray] = []
    have = 0
    while have < count:
        cube = rng.uniform(-1.0, 1.0, size=(_BATCH, d))
        inside = cube[np.einsum("ij,ij->i", cube, cube) <= 1.0]
        out.append(inside)
        have += len(inside)
    return center + radius * np.concatenate(out)[:count]


def uniform_ball(count: int, d: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in the origin-centered ball: normal direction, U^(1/d) radius."""
    direction = rng.normal(size=(count, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return direction * (radius * rng.uniform(size=(count, 1)) ** (1.0 / d))


def witness_radii(q, S: SiteSet, radius: float, cfg: OracleConfig) -> Dict[int, float]:
    """For every site owning some sample of the radius-ball around q, the
    distance from q to its closest such sample. q itself is sample zero."""
    q = np.asarray(q, dtype=float)
    rng = np.random.default_rng(cfg.rng_seed)
    samples = sample_ball(q, radius, cfg.samples_per_ball, rng)
    _, owners = S.kdtree.query(samples)
    dist = np.linalg.norm(samples - q, axis=1)

    radii: Dict[int, float] = {nearest_site(q, S): 0.0}
    order = np.argsort(dist, kind="stable")
    for owner, r in zip(owners[order].tolist(), dist[order].tolist()):
        radii.setdefault(int(owner), r)
    return radii


def oracle_s_prime(q, S: SiteSet, eps: float, cfg: Optional[OracleConfig] = None) -> List[int]:
    """Nearest sites of q and of uniform samples from the eps-ball around it."""
    cfg = cfg or OracleConfig()
    return sorted(witness_radii(q, S, eps, cfg))


def _circumball(support: np.ndarray) -> Tuple[np.ndarray, float]:
    """Smallest ball with every support point on its boundary."""
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    U = support[1:] - p0
    rhs = 0.5 * np.einsum("ij,ij->i", U, U)
    lam = np.linalg.lstsq(U @ U.T, rhs, rcond=None)[0]
    center = p0 + lam @ U
    return center, float(np.sum((center - p0) ** 2))


def smallest_enclosing_ball(S: SiteSet, seed: int = 0) -> Tuple[np.ndarray, float]:
    """Center and radius of the minimum enclosing ball (Welzl, explicit stack)."""
    d = S.dim
    pts = S.points[np.random.default_rng(seed).permutation(S.n)]

    # frame: (prefix length, support indices, stage); the last finished
    # frame leaves its ball in `ball`
    stack = [(len(pts), (), 0)]
    ball: Tuple[np.ndarray, float] = (np.zeros(d), -1.0)
    while stack:
        i, support, stage = stack.pop()
        if stage == 0:
            if i == 0 or len(support) == d + 1:
                ball = _circumball(pts[list(support)]) if support else (np.zeros(d), -1.0)
                continue
            stack.append((i, support, 1))
            stack.append((i - 1, support, 0))
        else:
            center, r2 = ball
            p = pts[i - 1]
            if np.sum((p - center) ** 2) <= r2 * (1.0 + 1e-10) + 1e-18:
                continue
            stack.append((i - 1, support + (i - 1,), 0))

    center, r2 = ball
    return center, float(np.sqrt(max(r2, 0.0)))


def smallest_enclosing_ball_radius(S: SiteSet) -> float:
    return smallest_enclosing_ball(S)[1]


def run_cardinality_experiment(
    n: int,
    d: int,
    eps: float,
    trials: int,
    seed: int,
    options: Optional[BuildOptions] = None,
) -> ExperimentReport:
    """Mean |S'| for uniform sites in the unit ball and queries in the
    half-radius ball, against (eps / 2r)^d n.

    Each trial grows only the boxes its single query descends through.
    """
    if n < 10 or trials < 10:
        raise ValueError(f"need n >= 10 and trials >= 10, got n={n}, trials={trials}")
    options = options or BuildOptions(lazy_tree=True)

    records = []
    for t in range(trials):
        trial_seed = seed + t
        rng = np.random.default_rng(trial_seed)
        S = SiteSet(uniform_ball(n, d, 1.0, rng))
        q = uniform_ball(1, d, 0.5, rng)[0]
        index = build(S, eps, options)
        result = query(index, q)
        refresh_stats(index)
        records.append(
            TrialRecord(
                trial=t,
                seed=trial_seed,
                r=smallest_enclosing_ball_radius(S),
                cardinality=len(result.s_prime),
                nodes=index.stats.main_nodes,
            )
        )
        logger.info("trial %d: |S'|=%d", t, len(result.s_prime))

    r = float(np.mean([rec.r for rec in records]))
    return ExperimentReport(
        n=n,
        d=d,
        eps=eps,
        r=r,
        predicted=predicted_cardinality(n, d, eps, r),
        measured_mean=float(np.mean([rec.cardinality for rec in records])),
        trials=trials,
        records=records,
    )


def check_query(index: AnnIndex, q, cfg: OracleConfig) -> Tuple[bool, bool, bool, float]:
    """Completeness, soundness and sandwich verdicts for one interior query,
    plus the largest witness radius among the returned sites."""
    S, eps = index.sites, index.params.eps
    result = query(index, q)
    complete = nearest_site(q, S) in result.s_prime

    radii = witness_radii(q, S, eps * (1.0 + cfg.slack), cfg)
    sound = all(s in radii for s in result.s_prime)
    witness = max((radii.get(s, np.inf) for s in result.s_prime), default=0.0)

    leaf, hits, _, _ = collect_site_sets(index, q)
    if leaf is None:
        sandwich = True
    else:
        union = set(leaf.site_set).union(*(hit.site_set for hit in hits))
        inner = oracle_s_prime(q, S, eps * (1.0 - cfg.slack), cfg)
        sandwich = set(inner) <= union
    return complete, sound, sandwich, float(witness)


def check_index(
    index: AnnIndex,
    queries: int,
    seed: int,
    cfg: Optional[OracleConfig] = None,
    workers: int = 1,
) -> CheckReport:
    """Audit `queries` uniform interior points; query k samples with seed rng_seed + k."""
    cfg = cfg or OracleConfig(rng_seed=seed)
    points = random_interior_points(index, queries, seed)

    def audit(k: int):
        return check_query(index, points[k], cfg.model_copy(update={"rng_seed": cfg.rng_seed + k}))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(audit, range(queries)))
    else:
        verdicts = [audit(k) for k in range(queries)]

    report = CheckReport(queries=queries)
    for q, (complete, sound, sandwich, witness) in zip(points, verdicts):
        if not complete:
            logger.error("completeness failure at %s", q.tolist())
            report.completeness_failures += 1
        report.soundness_passes += sound
        report.sandwich_passes += sandwich
        report.max_witness_radius = max(report.max_witness_radius, witness)
    return report


def eps_monotonicity_rate(
    S: SiteSet, eps: float, queries: int, seed: int, options: Optional[BuildOptions] = None
) -> float:
    """Fraction of queries whose answer under 2 eps contains the answer under eps."""
    options = options or BuildOptions(lazy_tree=True)
    fine = build(S, eps, options)
    coarse = build(S, 2.0 * eps, options)
    points = random_interior_points(fine, queries, seed)
    hits = sum(
        set(query(fine, q).s_prime) <= set(query(coarse, q).s_prime) for q in points
    )
    return hits / queries if queries else 1.0
