"""Inference-time score shaping and rotated non-maximum suppression."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from obbdet.boxes import OrientedBox3, iou_obb


@dataclass(frozen=True)
class Detection:
    class_label: int
    score: float
    box: OrientedBox3

    def __post_init__(self) -> None:
        if not (math.isfinite(self.score) and 0 <= self.score <= 1):
            raise ValueError(f"score must be finite in [0, 1], got {self.score}")


def apply_centerness(
    class_probs: Sequence[float], centerness: float
) -> tuple[float, ...]:
    """Scale classification scores by predicted centerness before NMS."""
    if not 0 <= centerness <= 1:
        raise ValueError("centerness must be in [0, 1]")
    if any(not 0 <= p <= 1 for p in class_probs):
        raise ValueError("class probabilities must be in [0, 1]")
    return tuple(p * centerness for p in class_probs)


def nms_rotated(
    dets: Sequence[Detection], iou_threshold: float
) -> list[Detection]:
    """Greedy per-class suppression with rotated IoU.

    Detections are visited per class in score-descending order (ties by input
    index); a detection is dropped when its IoU with an already-kept
    detection of the same class reaches the threshold. Kept detections are
    returned unmodified, sorted by score descending (ties by input index).
    """
    if not 0 < iou_threshold <= 1:
        raise ValueError("iou_threshold must be in (0, 1]")
    by_class: dict[int, list[tuple[int, Detection]]] = {}
    for idx, det in enumerate(dets):
        by_class.setdefault(det.class_label, []).append((idx, det))
    kept: list[tuple[int, Detection]] = []
    for group in by_class.values():
        group.sort(key=lambda item: (-item[1].score, item[0]))
        kept_boxes: list[OrientedBox3] = []
        for idx, det in group:
            if any(iou_obb(det.box, kb) >= iou_threshold for kb in kept_boxes):
                continue
            kept_boxes.append(det.box)
            kept.append((idx, det))
    kept.sort(key=lambda item: (-item[1].score, item[0]))
    return [det for _, det in kept]
