"""Sparse occupied-voxel sets: voxelization, level striding, score pruning.

Points are binned with floor(coordinate / voxel_size) per axis, origin at the
world origin. A multi-level hierarchy halves the resolution per level on top
of an initial backbone stride: level voxel size is
``base_voxel_size * 2**(level + stride_exponent)`` where the stride exponent
is 2 for a first stride of 1 and 3 for a first stride of 2 (e.g. base 0.01
with stride 2 gives level sizes 0.08, 0.16, 0.32, 0.64).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

import numpy as np

from obbdet.boxes import Location3

Voxel = tuple[int, int, int]


@dataclass(frozen=True)
class PointCloud:
    """N x 6 array of (x, y, z, r, g, b) points; colors in [0, 1]."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 6:
            raise ValueError(f"expected an (N, 6) point array, got shape {pts.shape}")
        if pts.shape[0] == 0:
            raise ValueError("point cloud is empty")
        if not np.all(np.isfinite(pts[:, :3])):
            raise ValueError("point coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def xyz(self) -> np.ndarray:
        return self.points[:, :3]


@dataclass(frozen=True)
class LevelSpec:
    """Feature-level geometry: base voxel size, level count, first stride."""

    base_voxel_size: float
    num_levels: int
    first_stride: int = 2

    def __post_init__(self) -> None:
        if not self.base_voxel_size > 0:
            raise ValueError("base_voxel_size must be positive")
        if self.num_levels < 1:
            raise ValueError("num_levels must be >= 1")
        if self.first_stride not in (1, 2):
            raise ValueError("first_stride must be 1 or 2")

    @property
    def stride_exponent(self) -> int:
        return 2 if self.first_stride == 1 else 3

    def level_voxel_size(self, level: int) -> float:
        if not 0 <= level < self.num_levels:
            raise ValueError(f"level {level} out of range [0, {self.num_levels})")
        return self.base_voxel_size * 2 ** (level + self.stride_exponent)


@dataclass(frozen=True)
class SparseVoxelSet:
    """Unique integer voxel coordinates at one resolution, optionally scored.

    ``level`` is None for a raw (base-resolution) voxelization and a feature
    level index for sets produced by ``level_locations``.
    """

    voxel_size: float
    voxels: frozenset[Voxel]
    level: int | None = None
    scores: Mapping[Voxel, float] | None = None

    def __post_init__(self) -> None:
        if not self.voxel_size > 0:
            raise ValueError("voxel_size must be positive")
        if self.scores is not None:
            missing = self.voxels - self.scores.keys()
            if missing:
                raise ValueError(f"{len(missing)} voxels have no score")

    def __len__(self) -> int:
        return len(self.voxels)

    def world_location(self, voxel: Voxel) -> Location3:
        """World coordinate of a voxel center."""
        return Location3(
            (voxel[0] + 0.5) * self.voxel_size,
            (voxel[1] + 0.5) * self.voxel_size,
            (voxel[2] + 0.5) * self.voxel_size,
        )

    def locations(self) -> list[Location3]:
        return [self.world_location(v) for v in sorted(self.voxels)]

    def with_scores(self, scores: Mapping[Voxel, float]) -> "SparseVoxelSet":
        return SparseVoxelSet(self.voxel_size, self.voxels, self.level, dict(scores))


def voxelize(cloud: PointCloud, voxel_size: float) -> SparseVoxelSet:
    """Bin a point cloud into unique integer voxels of the given edge size."""
    if not voxel_size > 0:
        raise ValueError("voxel_size must be positive")
    idx = np.floor(cloud.xyz / voxel_size).astype(np.int64)
    unique = np.unique(idx, axis=0)
    voxels = frozenset((int(x), int(y), int(z)) for x, y, z in unique)
    return SparseVoxelSet(voxel_size, voxels)


def level_locations(
    voxel_set: SparseVoxelSet, spec: LevelSpec, level: int
) -> SparseVoxelSet:
    """Downsample a voxel set to one feature level by integer halving.

    Accepts either a base voxelization (level None: shifted by
    ``stride_exponent + level``) or an earlier feature level (shifted by the
    level difference). Composing single-level steps equals one direct call.
    """
    if not 0 <= level < spec.num_levels:
        raise ValueError(f"level {level} out of range [0, {spec.num_levels})")
    if voxel_set.level is None:
        shift = spec.stride_exponent + level
    else:
        shift = level - voxel_set.level
        if shift < 0:
            raise ValueError("cannot upsample a voxel set")
    voxels = frozenset(
        (x >> shift, y >> shift, z >> shift) for x, y, z in voxel_set.voxels
    )
    return SparseVoxelSet(spec.level_voxel_size(level), voxels, level)


def prune_topk(voxel_set: SparseVoxelSet, n_vox: int) -> SparseVoxelSet:
    """Keep at most the ``n_vox`` highest-scored voxels.

    Ties are broken by lexicographic voxel coordinate for determinism. Sets
    already within the budget are returned unchanged.
    """
    if n_vox <= 0:
        raise ValueError("n_vox must be positive")
    if voxel_set.scores is None:
        raise ValueError("prune_topk needs a scored voxel set")
    if len(voxel_set) <= n_vox:
        return voxel_set
    ranked = sorted(voxel_set.voxels, key=lambda v: (-voxel_set.scores[v], v))
    kept = ranked[:n_vox]
    return SparseVoxelSet(
        voxel_set.voxel_size,
        frozenset(kept),
        voxel_set.level,
        {v: voxel_set.scores[v] for v in kept},
    )


def load_point_cloud(source: str | TextIO) -> PointCloud:
    """Read "x y z r g b" whitespace-separated text; '#' lines are comments.

    Raises ``ValueError`` with a line-numbered message on malformed input.
    """
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return load_point_cloud(fh)
    rows = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(
                f"line {lineno}: expected 6 fields 'x y z r g b', got {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise ValueError(f"line {lineno}: malformed float in {line!r}") from None
    if not rows:
        raise ValueError("point cloud file contains no points")
    return PointCloud(np.array(rows, dtype=float))


def save_point_cloud(cloud: PointCloud, dest: str | TextIO) -> None:
    if isinstance(dest, str):
        with open(dest, "w", encoding="utf-8") as fh:
            save_point_cloud(cloud, fh)
        return
    for row in cloud.points:
        dest.write(" ".join(_fmt(v) for v in row) + "\n")


def _fmt(v: float) -> str:
    if v == 0:
        v = 0.0  # avoid "-0.000000"
    return f"{v:.6f}"
