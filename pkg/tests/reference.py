"""Independent reference implementations used as test oracles.

These deliberately avoid the library's code paths: Monte-Carlo and shapely
IoU, a flat O(n^2) NMS, and a fully enumerated assignment.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from obbdet.boxes import OrientedBox3, iou_obb, volume
from obbdet.postprocess import Detection
from obbdet.assign import AssignmentConfig
from obbdet.voxels import SparseVoxelSet


def mc_iou_obb(
    a: OrientedBox3, b: OrientedBox3, n_samples: int, rng: np.random.Generator
) -> float:
    """Monte-Carlo IoU: uniform samples over the pair's joint bounding box."""
    corners = []
    for box in (a, b):
        c, s = math.cos(box.theta), math.sin(box.theta)
        for sx in (-0.5, 0.5):
            for sy in (-0.5, 0.5):
                dx, dy = sx * box.w, sy * box.l
                corners.append((box.x + c * dx - s * dy, box.y + s * dx + c * dy))
    corners = np.array(corners)
    lo = np.array(
        [corners[:, 0].min(), corners[:, 1].min(), min(a.z - a.h / 2, b.z - b.h / 2)]
    )
    hi = np.array(
        [corners[:, 0].max(), corners[:, 1].max(), max(a.z + a.h / 2, b.z + b.h / 2)]
    )
    pts = rng.uniform(lo, hi, size=(n_samples, 3))
    in_a = _points_in_box(pts, a)
    in_b = _points_in_box(pts, b)
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        return 0.0
    return np.count_nonzero(in_a & in_b) / union


def _points_in_box(pts: np.ndarray, box: OrientedBox3) -> np.ndarray:
    c, s = math.cos(box.theta), math.sin(box.theta)
    rx = pts[:, 0] - box.x
    ry = pts[:, 1] - box.y
    ox = c * rx + s * ry
    oy = -s * rx + c * ry
    oz = pts[:, 2] - box.z
    return (
        (np.abs(ox) <= box.w / 2)
        & (np.abs(oy) <= box.l / 2)
        & (np.abs(oz) <= box.h / 2)
    )


def shapely_iou_obb(a: OrientedBox3, b: OrientedBox3) -> float:
    """Exact rotated IoU through shapely polygon intersection."""
    from shapely.geometry import Polygon

    def poly(box: OrientedBox3) -> Polygon:
        c, s = math.cos(box.theta), math.sin(box.theta)
        pts = []
        for dx, dy in (
            (box.w / 2, box.l / 2),
            (-box.w / 2, box.l / 2),
            (-box.w / 2, -box.l / 2),
            (box.w / 2, -box.l / 2),
        ):
            pts.append((box.x + c * dx - s * dy, box.y + s * dx + c * dy))
        return Polygon(pts)

    area = poly(a).intersection(poly(b)).area
    dz = min(a.z + a.h / 2, b.z + b.h / 2) - max(a.z - a.h / 2, b.z - b.h / 2)
    if dz <= 0 or area <= 0:
        return 0.0
    inter = area * dz
    return inter / (volume(a) + volume(b) - inter)


def nms_reference(dets: Sequence[Detection], iou_threshold: float) -> list[Detection]:
    """Flat O(n^2) suppression over a precomputed IoU matrix."""
    n = len(dets)
    iou = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if dets[i].class_label == dets[j].class_label:
                iou[i, j] = iou[j, i] = iou_obb(dets[i].box, dets[j].box)
    order = sorted(range(n), key=lambda i: (-dets[i].score, i))
    kept: list[int] = []
    for i in order:
        ok = True
        for j in kept:
            if dets[i].class_label == dets[j].class_label and iou[i, j] >= iou_threshold:
                ok = False
                break
        if ok:
            kept.append(i)
    kept.sort(key=lambda i: (-dets[i].score, i))
    return [dets[i] for i in kept]


def brute_force_assign(
    boxes: Sequence[OrientedBox3],
    labels: Sequence[int],
    levels: Sequence[SparseVoxelSet],
    cfg: AssignmentConfig,
) -> set[tuple[int, tuple[int, int, int], int, int]]:
    """Exhaustive assignment; returns {(level, voxel, box_id, class_label)}."""
    coverage: list[list[list]] = []  # [box][level] -> list of (voxel, xyz)
    for box in boxes:
        rot = np.array(
            [
                [math.cos(-box.theta), -math.sin(-box.theta), 0.0],
                [math.sin(-box.theta), math.cos(-box.theta), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        half = np.array([box.w / 2, box.l / 2, box.h / 2])
        center = np.array([box.x, box.y, box.z])
        per_level = []
        for lv in levels:
            hits = []
            for voxel in sorted(lv.voxels):
                p = (np.array(voxel, dtype=float) + 0.5) * lv.voxel_size
                local = rot @ (p - center)
                if np.all(np.abs(local) < half):
                    hits.append((voxel, p))
            per_level.append(hits)
        coverage.append(per_level)

    claims: dict[tuple[int, tuple[int, int, int]], list[int]] = {}
    for bi, box in enumerate(boxes):
        eligible = [
            li for li in range(len(levels)) if len(coverage[bi][li]) >= cfg.n_loc
        ]
        lvl = eligible[-1] if eligible else 0
        center = np.array([box.x, box.y, box.z])
        ranked = sorted(
            coverage[bi][lvl],
            key=lambda item: (float(np.linalg.norm(item[1] - center)), item[0]),
        )
        for voxel, _ in ranked[: cfg.center_sample_k]:
            claims.setdefault((lvl, voxel), []).append(bi)

    out = set()
    for (lvl, voxel), claimants in claims.items():
        best = sorted(claimants, key=lambda i: (volume(boxes[i]), i))[0]
        out.add((lvl, voxel, best, labels[best]))
    return out
