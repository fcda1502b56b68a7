"""Multi-level anchor-free target assignment.

Per ground-truth box: pick the last (coarsest) feature level at which the box
covers at least ``n_loc`` locations, falling back to the first level; keep
the ``center_sample_k`` covered locations nearest the box center; resolve
cross-box claims in favor of the least-volume box. Unclaimed locations are
background and emit no target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from obbdet.boxes import Location3, OrientedBox3, centerness3d, volume
from obbdet.parametrize import BoxDeltas, DeltaMode, encode_aabb, encode_obb
from obbdet.voxels import SparseVoxelSet, Voxel


@dataclass(frozen=True)
class AssignmentConfig:
    """Assignment hyperparameters (defaults: 3^3 coverage, 18-location sampling)."""

    n_loc: int = 27
    center_sample_k: int = 18

    def __post_init__(self) -> None:
        if self.n_loc < 1:
            raise ValueError("n_loc must be >= 1")
        if self.center_sample_k < 1:
            raise ValueError("center_sample_k must be >= 1")


@dataclass(frozen=True)
class AssignmentTarget:
    """A foreground location matched to a ground-truth box."""

    location: Location3
    level: int
    voxel: Voxel
    class_label: int
    centerness: float
    deltas: BoxDeltas
    box_id: int


def _inside_footprint(box: OrientedBox3, loc: Location3) -> bool:
    """Strict interior test: rotated-rectangle in xy, interval in z."""
    dz = loc.z - box.z
    if not -box.h / 2 < dz < box.h / 2:
        return False
    c = math.cos(box.theta)
    s = math.sin(box.theta)
    rx = loc.x - box.x
    ry = loc.y - box.y
    ox = c * rx + s * ry
    oy = -s * rx + c * ry
    return -box.w / 2 < ox < box.w / 2 and -box.l / 2 < oy < box.l / 2


def _covered(box: OrientedBox3, level_locs: SparseVoxelSet) -> list[tuple[Voxel, Location3]]:
    out = []
    for voxel in level_locs.voxels:
        loc = level_locs.world_location(voxel)
        if _inside_footprint(box, loc):
            out.append((voxel, loc))
    return out


def covered_locations(box: OrientedBox3, level_locs: SparseVoxelSet) -> list[Location3]:
    """All level locations strictly inside the box."""
    return [loc for _, loc in _covered(box, level_locs)]


def select_level(
    box: OrientedBox3, all_levels: Sequence[SparseVoxelSet], cfg: AssignmentConfig
) -> int:
    """Last level index where the box covers >= n_loc locations, else 0."""
    if not all_levels:
        raise ValueError("need at least one feature level")
    chosen = 0
    found = False
    for i, level_locs in enumerate(all_levels):
        if len(_covered(box, level_locs)) >= cfg.n_loc:
            chosen = i
            found = True
    return chosen if found else 0


def assign(
    boxes: Sequence[OrientedBox3],
    class_labels: Sequence[int],
    all_levels: Sequence[SparseVoxelSet],
    cfg: AssignmentConfig,
    mode: DeltaMode,
) -> list[AssignmentTarget]:
    """Match feature-level locations to ground-truth boxes.

    Returns one target per claimed location (background locations are simply
    absent). Center sampling ranks covered locations by Euclidean distance to
    the box center in world coordinates, ties broken by voxel coordinate;
    contested locations go to the box of least volume, ties to the lower box
    index. Emitted deltas re-encode the matched box at the location in the
    requested mode (AABB mode requires theta == 0).
    """
    if len(boxes) != len(class_labels):
        raise ValueError("boxes and class_labels must have equal length")
    if any(label == 0 for label in class_labels):
        raise ValueError("class label 0 is reserved for background")
    if not all_levels:
        raise ValueError("need at least one feature level")

    # (level, voxel) -> list of claiming box indices
    claims: dict[tuple[int, Voxel], list[int]] = {}
    locations: dict[tuple[int, Voxel], Location3] = {}
    for bi, box in enumerate(boxes):
        lvl = select_level(box, all_levels, cfg)
        cov = _covered(box, all_levels[lvl])
        cov.sort(
            key=lambda vl: (
                math.dist((vl[1].x, vl[1].y, vl[1].z), (box.x, box.y, box.z)),
                vl[0],
            )
        )
        for voxel, loc in cov[: cfg.center_sample_k]:
            key = (lvl, voxel)
            claims.setdefault(key, []).append(bi)
            locations[key] = loc

    targets = []
    for (lvl, voxel), claimants in claims.items():
        bi = min(claimants, key=lambda i: (volume(boxes[i]), i))
        box = boxes[bi]
        loc = locations[(lvl, voxel)]
        if mode is DeltaMode.AABB:
            if box.theta != 0:
                raise ValueError("AABB assignment requires theta == 0 boxes")
            deltas = encode_aabb(box.as_aabb(), loc)
        else:
            deltas = encode_obb(box, loc, mode)
        targets.append(
            AssignmentTarget(
                location=loc,
                level=lvl,
                voxel=voxel,
                class_label=class_labels[bi],
                centerness=centerness3d(deltas),
                deltas=deltas,
                box_id=bi,
            )
        )
    targets.sort(key=lambda t: (t.level, t.voxel))
    return targets
