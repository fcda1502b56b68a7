"""mAP evaluation protocol plus a synthetic scene generator.

Detections are pooled across scenes per class; matching is greedy in score
order against at-most-once-matchable ground truth of the same scene and
class; AP uses all-point (monotone precision envelope) interpolation; mAP is
the unweighted mean over classes with at least one ground-truth instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from obbdet.boxes import OrientedBox3, iou_aabb, iou_obb
from obbdet.voxels import PointCloud


@dataclass(frozen=True)
class GroundTruthRecord:
    scene_id: str
    class_label: int
    box: OrientedBox3


@dataclass(frozen=True)
class DetectionRecord:
    scene_id: str
    class_label: int
    score: float
    box: OrientedBox3


@dataclass(frozen=True)
class EvalReport:
    """Per-class APs, per-threshold mAP and instance counts."""

    per_class_ap: Mapping[float, Mapping[int, float]]
    map_at: Mapping[float, float]
    gt_counts: Mapping[int, int]
    det_counts: Mapping[int, int]

    def format(self) -> str:
        """Fixed-layout key-value text with 4-decimal APs."""
        thresholds = sorted(self.map_at)
        classes = sorted(set(self.gt_counts) | set(self.det_counts))
        lines = [f"classes {len(classes)}"]
        for c in classes:
            parts = [
                f"class {c} gt {self.gt_counts.get(c, 0)} det {self.det_counts.get(c, 0)}"
            ]
            for t in thresholds:
                ap = self.per_class_ap[t].get(c, math.nan)
                parts.append(f"AP@{_fmt_thr(t)} " + ("-" if math.isnan(ap) else f"{ap:.4f}"))
            lines.append(" ".join(parts))
        for t in thresholds:
            lines.append(f"mAP@{_fmt_thr(t)} {self.map_at[t]:.4f}")
        return "\n".join(lines) + "\n"


def _fmt_thr(t: float) -> str:
    s = f"{t:g}"
    return s


def _box_iou(a: OrientedBox3, b: OrientedBox3, rotated: bool) -> float:
    if rotated:
        return iou_obb(a, b)
    return iou_aabb(a.as_aabb(), b.as_aabb())


def match_detections(
    dets: Sequence[DetectionRecord],
    gts: Sequence[GroundTruthRecord],
    iou_threshold: float,
    rotated: bool = True,
) -> list[bool]:
    """Greedy TP/FP flags aligned with ``dets``.

    Detections are processed in score-descending order (ties by input index);
    each matches the highest-IoU unmatched ground truth of the same scene and
    class if that IoU reaches the threshold.
    """
    gt_pool: dict[tuple[str, int], list[OrientedBox3]] = {}
    for gt in gts:
        gt_pool.setdefault((gt.scene_id, gt.class_label), []).append(gt.box)
    matched: dict[tuple[str, int], list[bool]] = {
        key: [False] * len(v) for key, v in gt_pool.items()
    }
    flags = [False] * len(dets)
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
    for i in order:
        det = dets[i]
        key = (det.scene_id, det.class_label)
        candidates = gt_pool.get(key, [])
        best_j = -1
        best_iou = 0.0
        for j, gt_box in enumerate(candidates):
            if matched[key][j]:
                continue
            iou = _box_iou(det.box, gt_box, rotated)
            if iou > best_iou:
                best_iou = iou
                best_j = j
        if best_j >= 0 and best_iou >= iou_threshold:
            matched[key][best_j] = True
            flags[i] = True
    return flags


def pr_curve(
    tp_fp_flags: Sequence[bool], scores: Sequence[float], n_gt: int
) -> list[tuple[float, float]]:
    """(recall, precision) points in score-descending order."""
    if len(tp_fp_flags) != len(scores):
        raise ValueError("flags and scores must align")
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    out = []
    tp = fp = 0
    for i in order:
        if tp_fp_flags[i]:
            tp += 1
        else:
            fp += 1
        recall = tp / n_gt if n_gt > 0 else 0.0
        out.append((recall, tp / (tp + fp)))
    return out


def average_precision(
    tp_fp_flags: Sequence[bool], scores: Sequence[float], n_gt: int
) -> float:
    """Area under the monotone-envelope precision-recall curve.

    Returns NaN when n_gt == 0 (the class is then excluded from mAP) and 0.0
    when there are ground truths but no detections.
    """
    if n_gt < 0:
        raise ValueError("n_gt must be >= 0")
    if n_gt == 0:
        return math.nan
    curve = pr_curve(tp_fp_flags, scores, n_gt)
    mrec = [0.0] + [r for r, _ in curve] + [1.0]
    mpre = [0.0] + [p for _, p in curve] + [0.0]
    for i in range(len(mpre) - 2, -1, -1):
        mpre[i] = max(mpre[i], mpre[i + 1])
    ap = 0.0
    for i in range(len(mrec) - 1):
        ap += (mrec[i + 1] - mrec[i]) * mpre[i + 1]
    return ap


def evaluate(
    dets: Sequence[DetectionRecord],
    gts: Sequence[GroundTruthRecord],
    thresholds: Iterable[float] = (0.25, 0.5),
    rotated: bool = True,
    classes: Iterable[int] | None = None,
) -> EvalReport:
    """Pooled cross-scene evaluation at one or more IoU thresholds.

    ``classes`` optionally fixes the vocabulary; labels outside it raise
    ``ValueError``. By default the vocabulary is the union of labels seen in
    ground truth and detections. Classes without ground truth are excluded
    from the mean.
    """
    thresholds = sorted(set(thresholds))
    if not thresholds:
        raise ValueError("need at least one IoU threshold")
    seen = {g.class_label for g in gts} | {d.class_label for d in dets}
    if classes is not None:
        vocab = set(classes)
        unknown = seen - vocab
        if unknown:
            raise ValueError(f"unknown class labels: {sorted(unknown)}")
    else:
        vocab = seen
    gt_counts = {c: sum(1 for g in gts if g.class_label == c) for c in vocab}
    det_counts = {c: sum(1 for d in dets if d.class_label == c) for c in vocab}
    per_class_ap: dict[float, dict[int, float]] = {}
    map_at: dict[float, float] = {}
    for t in thresholds:
        flags = match_detections(dets, gts, t, rotated)
        aps: dict[int, float] = {}
        for c in sorted(vocab):
            idx = [i for i, d in enumerate(dets) if d.class_label == c]
            aps[c] = average_precision(
                [flags[i] for i in idx],
                [dets[i].score for i in idx],
                gt_counts[c],
            )
        per_class_ap[t] = aps
        valid = [ap for c, ap in aps.items() if gt_counts[c] > 0]
        map_at[t] = sum(valid) / len(valid) if valid else 0.0
    return EvalReport(per_class_ap, map_at, gt_counts, det_counts)


# ---------------------------------------------------------------------------
# Synthetic scenes


def generate_scene(
    seed: int,
    room: tuple[float, float, float] = (6.0, 6.0, 3.0),
    num_classes: int = 5,
    num_boxes: int = 5,
    points_per_box: int = 200,
    clutter_points: int = 500,
    rotated: bool = True,
    scene_id: str = "scene0",
) -> tuple[PointCloud, list[GroundTruthRecord]]:
    """Deterministic synthetic scene: disjoint boxes with surface-sampled points.

    Boxes are sampled with disjoint footprint circumcircles so no two ground
    truths overlap; each contributes ``points_per_box`` points sampled on its
    faces (pulled fractionally inward so containment is strict), plus uniform
    near-floor clutter. Identical seeds give byte-identical outputs.

    Raises ``ValueError`` when the room cannot fit the requested boxes.
    """
    if num_boxes < 0 or points_per_box < 1 or num_classes < 1:
        raise ValueError("invalid scene parameters")
    if clutter_points < 1 and num_boxes == 0:
        raise ValueError("scene would contain no points")
    rng = np.random.default_rng(seed)
    min_ext = 0.3
    max_ext = min(1.5, min(room) / 2.0)
    if max_ext < min_ext:
        raise ValueError(f"room {room} too small for minimum box extent {min_ext}")
    boxes: list[OrientedBox3] = []
    gts: list[GroundTruthRecord] = []
    for _ in range(num_boxes):
        for _attempt in range(200):
            w, l, h = rng.uniform(min_ext, max_ext, size=3)
            theta = rng.uniform(-math.pi, math.pi) if rotated else 0.0
            r = math.hypot(w, l) / 2
            if room[0] - r <= r or room[1] - r <= r or room[2] - h / 2 <= h / 2:
                continue
            x = rng.uniform(r, room[0] - r)
            y = rng.uniform(r, room[1] - r)
            z = rng.uniform(h / 2, room[2] - h / 2)
            ok = True
            for other in boxes:
                ro = math.hypot(other.w, other.l) / 2
                if math.hypot(x - other.x, y - other.y) <= r + ro:
                    ok = False
                    break
            if ok:
                box = OrientedBox3(x, y, z, w, l, h, theta)
                boxes.append(box)
                gts.append(
                    GroundTruthRecord(
                        scene_id, int(rng.integers(1, num_classes + 1)), box
                    )
                )
                break
        else:
            raise ValueError("could not place a non-overlapping box in the room")
    chunks = []
    for box in boxes:
        chunks.append(_sample_box_surface(rng, box, points_per_box))
    if clutter_points > 0:
        clutter = np.empty((clutter_points, 3))
        clutter[:, 0] = rng.uniform(0, room[0], clutter_points)
        clutter[:, 1] = rng.uniform(0, room[1], clutter_points)
        clutter[:, 2] = rng.uniform(0, 0.05, clutter_points)
        chunks.append(clutter)
    xyz = np.vstack(chunks)
    colors = rng.uniform(0, 1, size=(xyz.shape[0], 3))
    return PointCloud(np.hstack([xyz, colors])), gts


def _sample_box_surface(
    rng: np.random.Generator, box: OrientedBox3, count: int
) -> np.ndarray:
    """Area-weighted uniform samples on the box faces, pulled 1e-6 inward."""
    areas = np.array([box.l * box.h, box.l * box.h, box.w * box.h, box.w * box.h,
                      box.w * box.l, box.w * box.l])
    faces = rng.choice(6, size=count, p=areas / areas.sum())
    u = rng.uniform(-0.5, 0.5, size=count)
    v = rng.uniform(-0.5, 0.5, size=count)
    local = np.empty((count, 3))
    half = np.array([box.w / 2, box.l / 2, box.h / 2])
    for i, f in enumerate(faces):
        axis = f // 2
        sign = 1.0 if f % 2 == 0 else -1.0
        p = np.empty(3)
        p[axis] = sign * half[axis]
        others = [a for a in range(3) if a != axis]
        p[others[0]] = u[i] * 2 * half[others[0]]
        p[others[1]] = v[i] * 2 * half[others[1]]
        local[i] = p
    local *= 1.0 - 1e-6  # strictly inside
    c, s = math.cos(box.theta), math.sin(box.theta)
    world = np.empty_like(local)
    world[:, 0] = box.x + c * local[:, 0] - s * local[:, 1]
    world[:, 1] = box.y + s * local[:, 0] + c * local[:, 1]
    world[:, 2] = box.z + local[:, 2]
    return world


# ---------------------------------------------------------------------------
# Interchange text formats


def _fmt(v: float) -> str:
    if v == 0:
        v = 0.0  # avoid "-0.000000"
    return f"{v:.6f}"


def format_ground_truth(gt: GroundTruthRecord) -> str:
    b = gt.box
    nums = " ".join(_fmt(v) for v in (b.x, b.y, b.z, b.w, b.l, b.h, b.theta))
    return f"{gt.scene_id} {gt.class_label} {nums}"


def format_detection(det: DetectionRecord) -> str:
    b = det.box
    nums = " ".join(
        _fmt(v) for v in (det.score, b.x, b.y, b.z, b.w, b.l, b.h, b.theta)
    )
    return f"{det.scene_id} {det.class_label} {nums}"


def _data_lines(source: TextIO) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def read_ground_truth(source: str | TextIO) -> list[GroundTruthRecord]:
    """Parse "scene_id class_id x y z w l h theta" records."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return read_ground_truth(fh)
    out = []
    for lineno, parts in _data_lines(source):
        if len(parts) != 9:
            raise ValueError(f"line {lineno}: expected 9 fields, got {len(parts)}")
        try:
            label = int(parts[1])
            vals = [float(p) for p in parts[2:]]
        except ValueError:
            raise ValueError(f"line {lineno}: malformed number") from None
        try:
            box = OrientedBox3(*vals)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        out.append(GroundTruthRecord(parts[0], label, box))
    return out


def read_detections(source: str | TextIO) -> list[DetectionRecord]:
    """Parse "scene_id class_id score x y z w l h theta" records."""
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            return read_detections(fh)
    out = []
    for lineno, parts in _data_lines(source):
        if len(parts) != 10:
            raise ValueError(f"line {lineno}: expected 10 fields, got {len(parts)}")
        try:
            label = int(parts[1])
            score = float(parts[2])
            vals = [float(p) for p in parts[3:]]
        except ValueError:
            raise ValueError(f"line {lineno}: malformed number") from None
        if not 0 <= score <= 1:
            raise ValueError(f"line {lineno}: score {score} outside [0, 1]")
        try:
            box = OrientedBox3(*vals)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        out.append(DetectionRecord(parts[0], label, score, box))
    return out
