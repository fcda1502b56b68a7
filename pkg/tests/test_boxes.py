import math

import numpy as np
import pytest

from obbdet.boxes import (
    AxisAlignedBox3,
    OrientedBox3,
    centerness3d,
    iou_aabb,
    iou_obb,
    volume,
)

from reference import mc_iou_obb, shapely_iou_obb
from util import equivalence_class, random_obb


class TestVolume:
    def test_unit_cube(self):
        assert volume(OrientedBox3(0, 0, 0, 1, 1, 1, 0)) == 1.0

    def test_products(self):
        assert volume(OrientedBox3(1, 2, 3, 2, 1, 0.5, 0.3)) == pytest.approx(1.0)
        assert volume(AxisAlignedBox3(0, 0, 0, 3, 2, 2)) == 12.0

    def test_rejects_nonpositive_extents(self):
        with pytest.raises(ValueError):
            OrientedBox3(0, 0, 0, 0.0, 1, 1, 0)
        with pytest.raises(ValueError):
            AxisAlignedBox3(0, 0, 0, 1, -1, 1)


class TestIouAabb:
    def test_identical(self):
        a = AxisAlignedBox3(0.5, -1, 2, 1, 1, 1)
        assert iou_aabb(a, a) == 1.0

    def test_disjoint(self):
        a = AxisAlignedBox3(0, 0, 0, 1, 1, 1)
        b = AxisAlignedBox3(2, 0, 0, 1, 1, 1)
        assert iou_aabb(a, b) == 0.0

    def test_half_offset(self):
        a = AxisAlignedBox3(0, 0, 0, 1, 1, 1)
        b = AxisAlignedBox3(0.5, 0, 0, 1, 1, 1)
        assert iou_aabb(a, b) == pytest.approx(1 / 3, abs=1e-12)

    def test_symmetric_random(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a = random_obb(rng).as_aabb()
            b = random_obb(rng).as_aabb()
            assert iou_aabb(a, b) == iou_aabb(b, a)


class TestIouObb:
    def test_equivalent_representation(self):
        box = OrientedBox3(0.2, -0.1, 0.5, 2, 1, 1, 0.3)
        swapped = OrientedBox3(0.2, -0.1, 0.5, 1, 2, 1, 0.3 + math.pi / 2)
        assert iou_obb(box, swapped) == pytest.approx(1.0, abs=1e-9)

    def test_45_degree_octagon(self):
        a = OrientedBox3(0, 0, 0, 1, 1, 1, 0)
        b = OrientedBox3(0, 0, 0, 1, 1, 1, math.pi / 4)
        inter = 2 * (math.sqrt(2) - 1)
        expected = inter / (2 - inter)
        assert iou_obb(a, b) == pytest.approx(expected, abs=1e-12)
        rng = np.random.default_rng(11)
        assert mc_iou_obb(a, b, 10**6, rng) == pytest.approx(expected, abs=5e-3)

    def test_disjoint(self):
        a = OrientedBox3(0, 0, 0, 1, 1, 1, 0.4)
        b = OrientedBox3(5, 5, 0, 1, 1, 1, -0.7)
        assert iou_obb(a, b) == 0.0

    def test_symmetry_random(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            a = random_obb(rng)
            b = random_obb(rng)
            assert iou_obb(a, b) == pytest.approx(iou_obb(b, a), abs=1e-12)

    def test_full_equivalence_class_random(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a = random_obb(rng)
            for rep in equivalence_class(a):
                assert iou_obb(a, rep) == pytest.approx(1.0, abs=1e-9)

    def test_matches_aabb_when_axis_aligned(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            a = random_obb(rng)
            b = random_obb(rng)
            a0 = OrientedBox3(a.x, a.y, a.z, a.w, a.l, a.h, 0.0)
            b0 = OrientedBox3(b.x, b.y, b.z, b.w, b.l, b.h, 0.0)
            assert iou_obb(a0, b0) == pytest.approx(
                iou_aabb(a0.as_aabb(), b0.as_aabb()), abs=1e-12
            )

    def test_matches_shapely(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            a = random_obb(rng, center_range=1.0)
            b = random_obb(rng, center_range=1.0)
            assert iou_obb(a, b) == pytest.approx(shapely_iou_obb(a, b), abs=1e-9)

    def test_monte_carlo_random(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            a = random_obb(rng, center_range=1.0)
            b = random_obb(rng, center_range=1.0)
            assert iou_obb(a, b) == pytest.approx(
                mc_iou_obb(a, b, 10**6, rng), abs=5e-3
            )


class TestCenterness:
    def test_center(self):
        assert centerness3d((0.5, 0.5, 1, 1, 0.2, 0.2)) == 1.0

    def test_on_face(self):
        assert centerness3d((0.0, 1.0, 0.5, 0.5, 0.5, 0.5)) == 0.0

    def test_direct_value(self):
        assert centerness3d((1, 3, 2, 2, 1, 1)) == pytest.approx(
            (1 / 3) ** (1 / 3), abs=1e-12
        )

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            centerness3d((-0.1, 1, 1, 1, 1, 1))

    def test_range_and_monotonicity(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            w, l, h = rng.uniform(0.5, 3, size=3)
            # Move from the center toward the +x face; centerness must not rise.
            prev = None
            for t in np.linspace(0, 0.999, 25):
                ox = t * w / 2
                c = centerness3d((w / 2 - ox, w / 2 + ox, l / 2, l / 2, h / 2, h / 2))
                assert 0 <= c <= 1
                if prev is not None:
                    assert c <= prev + 1e-12
                prev = c
