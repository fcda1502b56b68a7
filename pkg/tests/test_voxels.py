import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obbdet.voxels import (
    LevelSpec,
    PointCloud,
    SparseVoxelSet,
    level_locations,
    load_point_cloud,
    prune_topk,
    save_point_cloud,
    voxelize,
)


def _cloud(xyz):
    xyz = np.asarray(xyz, dtype=float)
    return PointCloud(np.hstack([xyz, np.zeros((xyz.shape[0], 3))]))


class TestVoxelize:
    def test_single_point(self):
        out = voxelize(_cloud([[0.005, 0.005, 0.005]]), 0.01)
        assert out.voxels == {(0, 0, 0)}

    def test_dedup(self):
        out = voxelize(_cloud([[0.001, 0.001, 0.001], [0.009, 0.002, 0.003]]), 0.01)
        assert out.voxels == {(0, 0, 0)}

    def test_neighbor_cells(self):
        out = voxelize(_cloud([[0.005, 0.001, 0.001], [0.015, 0.001, 0.001]]), 0.01)
        assert out.voxels == {(0, 0, 0), (1, 0, 0)}

    def test_negative_coordinates_floor(self):
        out = voxelize(_cloud([[-0.005, 0.0, 0.0]]), 0.01)
        assert out.voxels == {(-1, 0, 0)}

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            voxelize(_cloud([[0, 0, 0]]), 0.0)
        with pytest.raises(ValueError):
            PointCloud(np.zeros((0, 6)))

    @given(
        st.lists(
            st.tuples(
                st.floats(-10, 10, allow_nan=False),
                st.floats(-10, 10, allow_nan=False),
                st.floats(-10, 10, allow_nan=False),
            ),
            min_size=1,
            max_size=40,
        ),
        st.randoms(),
    )
    @settings(max_examples=100, deadline=None)
    def test_permutation_invariant(self, pts, rnd):
        shuffled = list(pts)
        rnd.shuffle(shuffled)
        assert voxelize(_cloud(pts), 0.37).voxels == voxelize(_cloud(shuffled), 0.37).voxels


class TestLevelSpec:
    def test_table_sizes_stride_2(self):
        spec = LevelSpec(0.01, 4, first_stride=2)
        assert [spec.level_voxel_size(i) for i in range(4)] == pytest.approx(
            [0.08, 0.16, 0.32, 0.64]
        )

    def test_table_sizes_stride_1(self):
        spec = LevelSpec(0.05, 3, first_stride=1)
        assert [spec.level_voxel_size(i) for i in range(3)] == pytest.approx(
            [0.2, 0.4, 0.8]
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            LevelSpec(0.0, 4)
        with pytest.raises(ValueError):
            LevelSpec(0.01, 0)
        with pytest.raises(ValueError):
            LevelSpec(0.01, 4, first_stride=3)


class TestLevelLocations:
    def test_two_to_one_merge(self):
        spec = LevelSpec(0.1, 2, first_stride=1)
        lv0 = SparseVoxelSet(spec.level_voxel_size(0), frozenset({(0, 0, 0), (1, 0, 0)}), 0)
        out = level_locations(lv0, spec, 1)
        assert out.voxels == {(0, 0, 0)}
        assert out.level == 1

    def test_nonempty_preserved(self):
        spec = LevelSpec(0.1, 4, first_stride=2)
        rng = np.random.default_rng(0)
        pts = rng.uniform(-3, 3, size=(50, 3))
        base = voxelize(_cloud(pts), 0.1)
        for lvl in range(4):
            assert len(level_locations(base, spec, lvl)) > 0

    def test_shift_arithmetic(self):
        spec = LevelSpec(0.1, 3, first_stride=1)
        lv0 = SparseVoxelSet(spec.level_voxel_size(0), frozenset({(3, 3, 3)}), 0)
        out = level_locations(lv0, spec, 2)
        assert out.voxels == {(0, 0, 0)}

    def test_composition_equals_direct(self):
        spec = LevelSpec(0.02, 4, first_stride=2)
        rng = np.random.default_rng(1)
        base = voxelize(_cloud(rng.uniform(-4, 4, size=(300, 3))), 0.02)
        stepped = level_locations(base, spec, 0)
        for lvl in range(1, 4):
            stepped = level_locations(stepped, spec, lvl)
            direct = level_locations(base, spec, lvl)
            assert stepped.voxels == direct.voxels
            assert stepped.voxel_size == direct.voxel_size

    def test_world_location(self):
        spec = LevelSpec(0.1, 1, first_stride=1)
        lv = SparseVoxelSet(spec.level_voxel_size(0), frozenset({(2, -1, 0)}), 0)
        loc = lv.world_location((2, -1, 0))
        assert (loc.x, loc.y, loc.z) == pytest.approx((1.0, -0.2, 0.2))


class TestPruneTopk:
    def _scored(self, scores):
        voxels = frozenset(scores)
        return SparseVoxelSet(0.1, voxels, None, dict(scores))

    def test_identity_when_under_budget(self):
        s = self._scored({(i, 0, 0): 0.5 for i in range(5)})
        assert prune_topk(s, 5) is s

    def test_topk(self):
        s = self._scored({(0, 0, 0): 0.9, (1, 0, 0): 0.5, (2, 0, 0): 0.1})
        out = prune_topk(s, 2)
        assert out.voxels == {(0, 0, 0), (1, 0, 0)}

    def test_lexicographic_ties(self):
        s = self._scored({(2, 0, 0): 0.5, (0, 1, 0): 0.5, (0, 0, 3): 0.5})
        out = prune_topk(s, 1)
        assert out.voxels == {(0, 0, 3)}

    def test_rejects_bad_inputs(self):
        s = self._scored({(0, 0, 0): 0.5})
        with pytest.raises(ValueError):
            prune_topk(s, 0)
        unscored = SparseVoxelSet(0.1, frozenset({(0, 0, 0)}))
        with pytest.raises(ValueError):
            prune_topk(unscored, 1)

    def test_contract_random(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            n = int(rng.integers(1, 40))
            voxels = {
                (int(v[0]), int(v[1]), int(v[2]))
                for v in rng.integers(-5, 5, size=(n, 3))
            }
            scores = {v: float(rng.choice([0.1, 0.5, 0.9])) for v in voxels}
            s = SparseVoxelSet(0.1, frozenset(voxels), None, scores)
            n_vox = int(rng.integers(1, 40))
            out = prune_topk(s, n_vox)
            assert len(out) == min(len(s), n_vox)
            assert out.voxels <= s.voxels
            dropped = s.voxels - out.voxels
            if dropped and out.voxels:
                assert min(scores[v] for v in out.voxels) >= max(
                    scores[v] for v in dropped
                )


class TestPointCloudText:
    def test_round_trip(self):
        cloud = _cloud([[0.1, 0.2, 0.3], [1, 2, 3]])
        buf = io.StringIO()
        save_point_cloud(cloud, buf)
        buf.seek(0)
        back = load_point_cloud(buf)
        assert np.allclose(back.points, cloud.points, atol=1e-6)

    def test_comments_and_blanks(self):
        text = "# header\n\n0.1 0.2 0.3 0.5 0.5 0.5\n"
        cloud = load_point_cloud(io.StringIO(text))
        assert cloud.count == 1

    def test_line_numbered_errors(self):
        with pytest.raises(ValueError, match="line 2"):
            load_point_cloud(io.StringIO("0 0 0 0 0 0\n1 2 3\n"))
        with pytest.raises(ValueError, match="line 1"):
            load_point_cloud(io.StringIO("a b c d e f\n"))
