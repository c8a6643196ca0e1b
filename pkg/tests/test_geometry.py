"""Unit tests for rotations and oriented boxes."""

import math

import numpy as np
import pytest

from vboxtree.utils.errors import CapacityError, DimensionMismatchError
from vboxtree.utils.geometry import (
    OrientedBox,
    Rotation,
    as_point,
    axis_box,
    box_contains,
    box_scale,
    box_subdivide,
    box_volume,
    rotation_matrix,
)


def random_box(rng, d: int) -> OrientedBox:
    angles = tuple(rng.uniform(0.0, math.pi, size=d - 1))
    return OrientedBox(rng.normal(size=d), rng.uniform(0.1, 2.0, size=d), Rotation(angles))


def points_inside(rng, box: OrientedBox, count: int) -> np.ndarray:
    local = rng.uniform(-1.0, 1.0, size=(count, box.dim)) * box.half_extents
    return box.center + local @ box.rotation.matrix.T


class TestRotationMatrix:
    """Tests for the ordered plane-rotation product."""

    def test_zero_angles_give_exact_identity(self):
        for d in range(1, 7):
            assert np.array_equal(rotation_matrix([0.0] * (d - 1)), np.eye(d))

    def test_quarter_turn_in_the_plane(self):
        R = rotation_matrix([math.pi / 2])
        assert np.allclose(R @ [1.0, 0.0], [0.0, 1.0])
        assert np.allclose(R @ [0.0, 1.0], [-1.0, 0.0])

    def test_first_plane_only_in_3d(self):
        R = rotation_matrix([math.pi / 2, 0.0])
        assert np.allclose(R @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        assert np.allclose(R @ [0.0, 0.0, 1.0], [0.0, 0.0, 1.0])

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_random_angles_are_rotations(self, rng, d):
        for _ in range(20):
            R = rotation_matrix(rng.uniform(0.0, math.pi, size=d - 1))
            assert np.allclose(R.T @ R, np.eye(d), atol=1e-12), "should be orthogonal"
            assert np.isclose(np.linalg.det(R), 1.0), "determinant should be +1"

    def test_isometry(self, rng):
        R = rotation_matrix(rng.uniform(0.0, math.pi, size=3))
        x = rng.normal(size=4)
        assert np.isclose(np.linalg.norm(R @ x), np.linalg.norm(x))

    def test_wrong_angle_count(self):
        with pytest.raises(DimensionMismatchError):
            rotation_matrix([0.1], dim=3)

    def test_non_finite_angle(self):
        with pytest.raises(ValueError):
            rotation_matrix([float("nan")])

    def test_rotation_identity(self):
        rot = Rotation.identity(3)
        assert rot.is_identity
        assert rot.dim == 3
        assert np.array_equal(rot.matrix, np.eye(3))


class TestOrientedBox:
    def test_as_point_checks_arity(self):
        assert as_point([1, 2], dim=2).tolist() == [1.0, 2.0]
        with pytest.raises(DimensionMismatchError):
            as_point([1, 2, 3], dim=2)
        with pytest.raises(ValueError):
            as_point([1.0, float("inf")])

    def test_rejects_non_positive_half_extents(self):
        with pytest.raises(ValueError):
            OrientedBox([0.0, 0.0], [1.0, 0.0])
        with pytest.raises(ValueError):
            OrientedBox([0.0, 0.0], [1.0, -1.0])

    def test_rejects_mismatched_rotation(self):
        with pytest.raises(DimensionMismatchError):
            OrientedBox([0.0, 0.0], [1.0, 1.0], Rotation((0.1, 0.2)))

    def test_corners(self, rng):
        box = random_box(rng, 3)
        corners = box.corners()
        assert corners.shape == (8, 3)
        assert np.all(box.contains_many(corners))
        assert np.allclose(np.linalg.norm(corners - box.center, axis=1), box.diagonal / 2)

    def test_linear_range_matches_corners(self, rng):
        box = random_box(rng, 4)
        a = rng.normal(size=4)
        lo, hi = box.linear_range(a)
        values = box.corners() @ a
        assert np.isclose(lo, values.min())
        assert np.isclose(hi, values.max())


class TestBoxContains:
    def test_closed_axis_box(self):
        box = axis_box([0.0, 0.0], 1.0)
        assert box_contains(box, [1.0, 1.0])
        assert box_contains(box, [-1.0, 0.5])
        assert box_contains(box, [1.0 + 1e-12, 0.0]), "within tolerance"
        assert not box_contains(box, [1.0001, 0.0])

    def test_rotated_box(self):
        box = OrientedBox([0.0, 0.0], [2.0, 0.5], Rotation((math.pi / 4,)))
        assert box_contains(box, [1.0, 1.0]), "(1,1) lies along the long axis"
        assert not box_contains(box, [1.0, -1.0]), "(1,-1) lies across the short axis"

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            box_contains(axis_box([0.0, 0.0], 1.0), [0.0, 0.0, 0.0])


class TestBoxScale:
    def test_volume_and_identity(self):
        box = axis_box([1.0, 2.0], 0.5)
        assert np.isclose(box_scale(box, 2.0).volume, 4.0 * box.volume)
        same = box_scale(box, 1.0)
        assert np.array_equal(same.center, box.center)
        assert np.array_equal(same.half_extents, box.half_extents)

    def test_non_positive_factor(self):
        with pytest.raises(ValueError):
            box_scale(axis_box([0.0], 1.0), 0.0)

    def test_nesting(self, rng):
        box = random_box(rng, 3)
        bigger = box_scale(box, 1.5)
        assert np.all(bigger.contains_many(points_inside(rng, box, 500)))


class TestBoxSubdivide:
    def test_interval(self):
        left, right = box_subdivide(axis_box([1.0], 1.0))
        assert left.center.tolist() == [0.5]
        assert right.center.tolist() == [1.5]
        assert left.half_extents.tolist() == [0.5]

    def test_child_order_follows_bits(self):
        children = box_subdivide(axis_box([0.0, 0.0], 1.0))
        assert [c.center.tolist() for c in children] == [
            [-0.5, -0.5],
            [0.5, -0.5],
            [-0.5, 0.5],
            [0.5, 0.5],
        ]

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_volumes_sum_to_parent(self, rng, d):
        box = random_box(rng, d)
        children = box_subdivide(box)
        assert len(children) == 2 ** d
        assert np.isclose(sum(c.volume for c in children), box.volume)

    def test_child_index_picks_a_containing_child(self, rng):
        box = random_box(rng, 3)
        children = box_subdivide(box)
        for x in points_inside(rng, box, 2000):
            assert box_contains(children[box.child_index(x)], x)

    def test_boundary_goes_to_upper_child(self):
        box = axis_box([0.0, 0.0], 1.0)
        assert box.child_index(np.array([0.0, 0.0])) == 3
        assert box.child_index(np.array([-0.5, 0.0])) == 2

    def test_capacity(self):
        with pytest.raises(CapacityError):
            box_subdivide(axis_box(np.zeros(7), 1.0), max_dim=6)


class TestBoxVolume:
    def test_examples(self):
        assert box_volume(axis_box([0.0, 0.0], 1.0)) == 4.0
        assert box_volume(OrientedBox([0.0, 0.0, 0.0], [0.5, 1.0, 2.0])) == 8.0

    def test_rotation_invariance(self, rng):
        box = random_box(rng, 3)
        assert np.isclose(box_volume(box), box_volume(box.reoriented(Rotation.identity(3))))
