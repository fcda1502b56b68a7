import math

import numpy as np
import pytest

from obbdet.boxes import OrientedBox3, iou_obb
from obbdet.postprocess import Detection, apply_centerness, nms_rotated

from reference import nms_reference
from util import random_obb


class TestApplyCenterness:
    def test_identity(self):
        assert apply_centerness((0.8, 0.4), 1.0) == (0.8, 0.4)

    def test_annihilator(self):
        assert apply_centerness((0.8, 0.4), 0.0) == (0.0, 0.0)

    def test_product(self):
        assert apply_centerness((0.8, 0.4), 0.5) == pytest.approx((0.4, 0.2))

    def test_validation(self):
        with pytest.raises(ValueError):
            apply_centerness((0.5,), 1.5)
        with pytest.raises(ValueError):
            apply_centerness((1.5,), 0.5)


def _det(score, box, label=1):
    return Detection(label, score, box)


class TestNmsRotated:
    def test_identical_boxes(self):
        box = OrientedBox3(0, 0, 0, 1, 1, 1, 0.2)
        kept = nms_rotated([_det(0.9, box), _det(0.8, box)], 0.5)
        assert [d.score for d in kept] == [0.9]

    def test_disjoint_all_kept(self):
        dets = [
            _det(0.9, OrientedBox3(0, 0, 0, 1, 1, 1, 0.1)),
            _det(0.8, OrientedBox3(5, 0, 0, 1, 1, 1, -0.3)),
            _det(0.7, OrientedBox3(0, 5, 0, 1, 1, 1, 0.7)),
        ]
        assert len(nms_rotated(dets, 0.5)) == 3

    def test_chain_suppression(self):
        # A overlaps B (~0.6), B overlaps C (~0.6), A vs C low: keep A and C.
        a = OrientedBox3(0.0, 0, 0, 2, 1, 1, 0)
        b = OrientedBox3(0.5, 0, 0, 2, 1, 1, 0)
        c = OrientedBox3(1.0, 0, 0, 2, 1, 1, 0)
        assert iou_obb(a, b) == pytest.approx(0.6, abs=1e-12)
        assert iou_obb(b, c) == pytest.approx(0.6, abs=1e-12)
        assert iou_obb(a, c) == pytest.approx(1 / 3, abs=1e-12)
        dets = [_det(0.9, a), _det(0.8, b), _det(0.7, c)]
        kept = nms_rotated(dets, 0.5)
        assert [d.score for d in kept] == [0.9, 0.7]

    def test_classes_do_not_suppress_each_other(self):
        box = OrientedBox3(0, 0, 0, 1, 1, 1, 0)
        dets = [_det(0.9, box, label=1), _det(0.8, box, label=2)]
        assert len(nms_rotated(dets, 0.5)) == 2

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            nms_rotated([], 0.0)
        with pytest.raises(ValueError):
            nms_rotated([], 1.5)

    def test_kept_pairwise_iou_below_threshold(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            dets = _random_scene(rng)
            kept = nms_rotated(dets, 0.5)
            assert set(id(d) for d in kept) <= set(id(d) for d in dets)
            for i in range(len(kept)):
                for j in range(i + 1, len(kept)):
                    if kept[i].class_label == kept[j].class_label:
                        assert iou_obb(kept[i].box, kept[j].box) < 0.5

    def test_scale_equivariance(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            dets = _random_scene(rng)
            kept = nms_rotated(dets, 0.5)
            factor = 3.7
            scaled = [
                Detection(
                    d.class_label,
                    d.score,
                    OrientedBox3(
                        d.box.x * factor,
                        d.box.y * factor,
                        d.box.z * factor,
                        d.box.w * factor,
                        d.box.l * factor,
                        d.box.h * factor,
                        d.box.theta,
                    ),
                )
                for d in dets
            ]
            kept_scaled = nms_rotated(scaled, 0.5)
            assert [d.score for d in kept_scaled] == [d.score for d in kept]

    def test_matches_naive_reference(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            dets = _random_scene(rng)
            kept = nms_rotated(dets, 0.5)
            ref = nms_reference(dets, 0.5)
            assert [id(d) for d in kept] == [id(d) for d in ref]


def _random_scene(rng, max_dets=12):
    n = int(rng.integers(1, max_dets))
    dets = []
    for _ in range(n):
        box = random_obb(rng, center_range=1.0, min_ext=0.5, max_ext=2.0)
        dets.append(
            Detection(int(rng.integers(1, 4)), float(rng.uniform(0, 1)), box)
        )
    return dets
