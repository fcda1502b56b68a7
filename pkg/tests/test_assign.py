import math

import numpy as np
import pytest

from obbdet.assign import (
    AssignmentConfig,
    assign,
    covered_locations,
    select_level,
)
from obbdet.boxes import OrientedBox3, iou_obb
from obbdet.parametrize import DeltaMode, decode_obb
from obbdet.voxels import LevelSpec, SparseVoxelSet

from reference import brute_force_assign


def _grid_level(n, voxel_size, level=0):
    """Fully occupied n x n x n voxel grid at one level."""
    voxels = frozenset(
        (i, j, k) for i in range(n) for j in range(n) for k in range(n)
    )
    return SparseVoxelSet(voxel_size, voxels, level)


class TestCoveredLocations:
    def test_box_containing_everything(self):
        lv = _grid_level(4, 0.1)
        box = OrientedBox3(0.2, 0.2, 0.2, 2, 2, 2, 0.3)
        assert len(covered_locations(box, lv)) == 64

    def test_disjoint_box(self):
        lv = _grid_level(4, 0.1)
        box = OrientedBox3(10, 10, 10, 1, 1, 1, 0)
        assert covered_locations(box, lv) == []

    def test_half_grid_count(self):
        # 4x4x4 grid with 0.1 voxels spans [0, 0.4]^3; a box over the lower
        # half in x covers 2*4*4 = 32 locations.
        lv = _grid_level(4, 0.1)
        box = OrientedBox3(0.1, 0.2, 0.2, 0.21, 0.5, 0.5, 0)
        assert len(covered_locations(box, lv)) == 32

    def test_rotated_footprint(self):
        lv = _grid_level(4, 0.1)
        # A thin diagonal box catches only the main-diagonal xy columns.
        box = OrientedBox3(0.2, 0.2, 0.2, 0.8, 0.05, 0.5, math.pi / 4)
        got = {(v.x, v.y) for v in covered_locations(box, lv)}
        assert got == {(0.05 + 0.1 * i, 0.05 + 0.1 * i) for i in range(4)}


class TestSelectLevel:
    def _levels(self):
        spec = LevelSpec(0.05, 3, first_stride=1)
        return [
            _grid_level(8, spec.level_voxel_size(0), 0),
            _grid_level(4, spec.level_voxel_size(1), 1),
            _grid_level(2, spec.level_voxel_size(2), 2),
        ]

    def test_huge_box_takes_last_level(self):
        levels = self._levels()
        box = OrientedBox3(0.8, 0.8, 0.8, 3.5, 3.5, 3.5, 0)
        cfg = AssignmentConfig(n_loc=8)
        assert all(len(covered_locations(box, lv)) >= 8 for lv in levels)
        assert select_level(box, levels, cfg) == 2

    def test_tiny_box_falls_back_to_first(self):
        levels = self._levels()
        box = OrientedBox3(0.8, 0.8, 0.8, 0.1, 0.1, 0.1, 0)
        assert select_level(box, levels, AssignmentConfig()) == 0

    def test_middle_level(self):
        levels = self._levels()
        # Covers >= 27 at levels 0 and 1, fewer than 27 at level 2.
        box = OrientedBox3(0.8, 0.8, 0.8, 1.3, 1.3, 1.3, 0)
        counts = [len(covered_locations(box, lv)) for lv in levels]
        assert counts[0] >= 27 and counts[1] >= 27 and counts[2] < 27
        assert select_level(box, levels, AssignmentConfig()) == 1


class TestAssign:
    def test_center_sampling_cap(self):
        lv = _grid_level(4, 0.1)
        box = OrientedBox3(0.2, 0.2, 0.2, 1, 1, 1, 0)
        targets = assign([box], [3], [lv], AssignmentConfig(n_loc=27, center_sample_k=18),
                         DeltaMode.MOBIUS)
        assert len(targets) == 18
        assert all(t.box_id == 0 and t.class_label == 3 for t in targets)

    def test_nested_boxes_least_volume_wins(self):
        lv = SparseVoxelSet(0.1, frozenset({(0, 0, 0)}), 0)
        big = OrientedBox3(0.05, 0.05, 0.05, 2, 2, 2, 0)
        small = OrientedBox3(0.05, 0.05, 0.05, 0.5, 0.5, 0.5, 0)
        targets = assign(
            [big, small], [1, 2], [lv], AssignmentConfig(n_loc=1, center_sample_k=4),
            DeltaMode.MOBIUS,
        )
        assert len(targets) == 1
        assert targets[0].box_id == 1
        assert targets[0].class_label == 2

    def test_no_boxes(self):
        lv = _grid_level(2, 0.1)
        assert assign([], [], [lv], AssignmentConfig(), DeltaMode.MOBIUS) == []

    def test_rejects_background_label(self):
        lv = _grid_level(2, 0.1)
        box = OrientedBox3(0.1, 0.1, 0.1, 1, 1, 1, 0)
        with pytest.raises(ValueError):
            assign([box], [0], [lv], AssignmentConfig(), DeltaMode.MOBIUS)

    def test_targets_decode_to_matched_box(self):
        rng = np.random.default_rng(0)
        spec = LevelSpec(0.05, 2, first_stride=1)
        levels = [
            _grid_level(10, spec.level_voxel_size(0), 0),
            _grid_level(5, spec.level_voxel_size(1), 1),
        ]
        boxes = []
        while len(boxes) < 5:
            b = OrientedBox3(
                *rng.uniform(0.5, 1.5, size=3),
                *rng.uniform(0.4, 1.2, size=3),
                rng.uniform(-math.pi, math.pi),
            )
            if abs(math.log(b.w / b.l)) >= 1e-6:
                boxes.append(b)
        labels = [int(rng.integers(1, 4)) for _ in boxes]
        targets = assign(boxes, labels, levels, AssignmentConfig(n_loc=8, center_sample_k=6),
                         DeltaMode.MOBIUS)
        assert targets
        for t in targets:
            decoded = decode_obb(t.deltas, t.location)
            assert iou_obb(decoded, boxes[t.box_id]) >= 1 - 1e-9
            assert t.centerness > 0

    def test_each_location_claimed_once(self):
        rng = np.random.default_rng(1)
        lv = _grid_level(6, 0.1)
        boxes = [
            OrientedBox3(
                *rng.uniform(0.1, 0.5, size=3),
                *rng.uniform(0.2, 0.6, size=3),
                rng.uniform(-math.pi, math.pi),
            )
            for _ in range(6)
        ]
        targets = assign(
            boxes, [1] * 6, [lv], AssignmentConfig(n_loc=4, center_sample_k=8),
            DeltaMode.MOBIUS,
        )
        keys = [(t.level, t.voxel) for t in targets]
        assert len(keys) == len(set(keys))
        per_box = {}
        for t in targets:
            per_box[t.box_id] = per_box.get(t.box_id, 0) + 1
        assert all(n <= 8 for n in per_box.values())

    def test_matches_brute_force_random_scenes(self):
        rng = np.random.default_rng(42)
        spec = LevelSpec(0.1, 3, first_stride=1)
        for _ in range(20):
            occupied = frozenset(
                (int(v[0]), int(v[1]), int(v[2]))
                for v in rng.integers(0, 8, size=(int(rng.integers(40, 200)), 3))
            )
            levels = [SparseVoxelSet(spec.level_voxel_size(0), occupied, 0)]
            for lvl in (1, 2):
                shift = lvl
                levels.append(
                    SparseVoxelSet(
                        spec.level_voxel_size(lvl),
                        frozenset((x >> shift, y >> shift, z >> shift) for x, y, z in occupied),
                        lvl,
                    )
                )
            n_boxes = int(rng.integers(1, 10))
            boxes = [
                OrientedBox3(
                    *rng.uniform(0.5, 2.7, size=3),
                    *rng.uniform(0.3, 2.0, size=3),
                    rng.uniform(-math.pi, math.pi),
                )
                for _ in range(n_boxes)
            ]
            labels = [int(rng.integers(1, 5)) for _ in range(n_boxes)]
            cfg = AssignmentConfig(n_loc=10, center_sample_k=7)
            got = {
                (t.level, t.voxel, t.box_id, t.class_label)
                for t in assign(boxes, labels, levels, cfg, DeltaMode.MOBIUS)
            }
            assert got == brute_force_assign(boxes, labels, levels, cfg)
