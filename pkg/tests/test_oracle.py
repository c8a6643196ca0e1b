"""Tests for the sampled oracle, the enclosing ball and the experiments."""

import itertools
import math

import numpy as np
import pytest

from vboxtree.utils.analysis import predicted_cardinality
from vboxtree.utils.cells import SiteSet
from vboxtree.utils.oracle import (
    check_index,
    eps_monotonicity_rate,
    oracle_s_prime,
    run_cardinality_experiment,
    sample_ball,
    smallest_enclosing_ball,
    smallest_enclosing_ball_radius,
    uniform_ball,
    witness_radii,
)
from vboxtree.utils.schema import BuildOptions, OracleConfig

from conftest import PLANE_EPS, uniform_sites


def brute_force_circle_radius(points: np.ndarray) -> float:
    """Smallest circle through some pair or triple that covers every point."""
    best = math.inf
    candidates = []
    for a, b in itertools.combinations(points, 2):
        candidates.append(((a + b) / 2.0, np.linalg.norm(a - b) / 2.0))
    for a, b, c in itertools.combinations(points, 3):
        M = 2.0 * np.array([b - a, c - a])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        center = np.linalg.solve(M, [b @ b - a @ a, c @ c - a @ a])
        candidates.append((center, np.linalg.norm(a - center)))
    for center, r in candidates:
        if np.all(np.linalg.norm(points - center, axis=1) <= r + 1e-9):
            best = min(best, r)
    return best


class TestSampling:
    def test_sample_ball_inside(self, rng):
        pts = sample_ball(np.array([1.0, -2.0, 0.5]), 0.3, 1000, rng)
        assert pts.shape == (1000, 3)
        assert np.all(np.linalg.norm(pts - [1.0, -2.0, 0.5], axis=1) <= 0.3 + 1e-12)

    def test_longer_stream_extends_shorter(self):
        short = sample_ball(np.zeros(2), 1.0, 100, np.random.default_rng(5))
        long = sample_ball(np.zeros(2), 1.0, 5000, np.random.default_rng(5))
        assert np.array_equal(short, long[:100])

    def test_uniform_ball_radius(self, rng):
        pts = uniform_ball(2000, 3, 0.5, rng)
        norms = np.linalg.norm(pts, axis=1)
        assert np.all(norms <= 0.5 + 1e-12)
        assert norms.max() > 0.45


class TestOracleSPrime:
    def test_vanishing_eps_gives_nearest(self):
        S = uniform_sites(20, 2, seed=21)
        q = np.array([0.4, 0.6])
        nearest = int(np.argmin(np.linalg.norm(S.points - q, axis=1)))
        assert oracle_s_prime(q, S, 1e-12, OracleConfig(samples_per_ball=500)) == [nearest]

    def test_on_bisector(self):
        S = SiteSet([[0.0, 0.0], [2.0, 0.0]])
        cfg = OracleConfig(samples_per_ball=2000, rng_seed=1)
        assert oracle_s_prime([1.0, 0.0], S, 0.5, cfg) == [0, 1]

    def test_more_samples_give_a_superset(self):
        S = uniform_sites(50, 2, seed=22)
        q = np.array([0.5, 0.5])
        few = oracle_s_prime(q, S, 0.2, OracleConfig(samples_per_ball=1000, rng_seed=3))
        many = oracle_s_prime(q, S, 0.2, OracleConfig(samples_per_ball=4000, rng_seed=3))
        assert set(few) <= set(many)

    def test_witness_radii(self):
        S = uniform_sites(30, 2, seed=23)
        q = np.array([0.3, 0.3])
        radii = witness_radii(q, S, 0.2, OracleConfig(samples_per_ball=2000))
        nearest = int(np.argmin(np.linalg.norm(S.points - q, axis=1)))
        assert radii[nearest] == 0.0
        assert all(0.0 <= r <= 0.2 + 1e-12 for r in radii.values())


class TestSmallestEnclosingBall:
    def test_unit_square(self):
        S = SiteSet([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        center, r = smallest_enclosing_ball(S)
        assert math.isclose(r, math.sqrt(2) / 2)
        assert np.allclose(center, [0.5, 0.5])

    def test_degenerate_sets(self):
        assert smallest_enclosing_ball_radius(SiteSet([[3.0, 4.0]])) == 0.0
        assert math.isclose(smallest_enclosing_ball_radius(SiteSet([[0.0, 0.0], [2.0, 0.0]])), 1.0)

    def test_octahedron(self):
        pts = np.vstack([np.eye(3), -np.eye(3), [[0.1, 0.2, 0.3]]])
        assert math.isclose(smallest_enclosing_ball_radius(SiteSet(pts)), 1.0)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_brute_force_in_the_plane(self, seed):
        S = uniform_sites(8, 2, seed=100 + seed)
        assert math.isclose(
            smallest_enclosing_ball_radius(S), brute_force_circle_radius(S.points), rel_tol=1e-7
        )

    @pytest.mark.parametrize("d", [3, 4])
    def test_covers_and_touches(self, d):
        S = uniform_sites(60, d, seed=30 + d)
        center, r = smallest_enclosing_ball(S, seed=1)
        dist = np.linalg.norm(S.points - center, axis=1)
        assert np.all(dist <= r * (1 + 1e-9) + 1e-12)
        assert np.isclose(dist.max(), r)
        centroid_radius = np.linalg.norm(S.points - S.points.mean(axis=0), axis=1).max()
        assert r <= centroid_radius + 1e-12


class TestCardinalityExperiment:
    OPTIONS = BuildOptions(margin=0.25, lazy_tree=True)

    def test_report(self):
        report = run_cardinality_experiment(10, 2, 0.5, trials=10, seed=0, options=self.OPTIONS)
        assert report.trials == 10
        assert [rec.seed for rec in report.records] == list(range(10))
        assert 0.0 < report.r <= 1.0
        assert math.isclose(report.predicted, predicted_cardinality(10, 2, 0.5, report.r))
        assert report.measured_mean >= 1.0
        assert all(1 <= rec.cardinality <= 10 for rec in report.records)

    def test_deterministic(self):
        first = run_cardinality_experiment(10, 2, 0.5, trials=10, seed=4, options=self.OPTIONS)
        second = run_cardinality_experiment(10, 2, 0.5, trials=10, seed=4, options=self.OPTIONS)
        assert first.model_dump() == second.model_dump()

    def test_lazy_trials_match_eager_builds(self):
        lazy = run_cardinality_experiment(10, 2, 0.5, trials=10, seed=7)
        eager = run_cardinality_experiment(10, 2, 0.5, trials=10, seed=7, options=BuildOptions())
        assert [rec.cardinality for rec in lazy.records] == [rec.cardinality for rec in eager.records]
        assert all(a.nodes <= b.nodes for a, b in zip(lazy.records, eager.records))

    def test_rejects_small_runs(self):
        with pytest.raises(ValueError):
            run_cardinality_experiment(5, 2, 0.5, trials=10, seed=0)
        with pytest.raises(ValueError):
            run_cardinality_experiment(10, 2, 0.5, trials=3, seed=0)


class TestCheckIndex:
    def test_plane_index_passes(self, plane_index):
        cfg = OracleConfig(samples_per_ball=2000, rng_seed=0)
        report = check_index(plane_index, 50, seed=0, cfg=cfg)
        assert report.queries == 50
        assert report.completeness_failures == 0
        assert report.completeness_rate == 1.0
        assert report.soundness_rate >= 0.9
        assert 0.0 <= report.sandwich_rate <= 1.0

    def test_threads_match_serial(self, plane_index):
        cfg = OracleConfig(samples_per_ball=500, rng_seed=2)
        serial = check_index(plane_index, 20, seed=2, cfg=cfg)
        threaded = check_index(plane_index, 20, seed=2, cfg=cfg, workers=4)
        assert serial.model_dump() == threaded.model_dump()

    def test_eps_monotonicity_rate(self, plane_sites):
        rate = eps_monotonicity_rate(
            plane_sites, PLANE_EPS, 100, seed=0, options=BuildOptions(margin=0.25, lazy_aux=True)
        )
        assert 0.0 <= rate <= 1.0
