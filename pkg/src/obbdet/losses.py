"""Detection losses: focal classification, IoU regression, centerness BCE.

The per-scene total is (cls + reg + cntr) / n_pos, with regression and
centerness restricted to foreground locations. Probabilities are clamped to
[1e-7, 1 - 1e-7] before any logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from obbdet.boxes import Location3, iou_aabb, iou_obb
from obbdet.parametrize import BoxDeltas, DeltaMode, decode_aabb, decode_obb
from obbdet.assign import AssignmentTarget

PROB_EPS = 1e-7

DEFAULT_GAMMA = 2.0
DEFAULT_ALPHA = 0.25


@dataclass(frozen=True)
class LossBreakdown:
    cls: float
    reg: float
    cntr: float
    total: float
    n_pos: int
    empty_scene: bool = False


@dataclass(frozen=True)
class LocationPrediction:
    """Head output at one location: class probabilities, deltas, centerness."""

    class_probs: tuple[float, ...]
    deltas: BoxDeltas | None = None
    centerness: float | None = None


def _clamp(p: float) -> float:
    return min(max(p, PROB_EPS), 1.0 - PROB_EPS)


def focal_loss(
    pred_probs: Sequence[float],
    true_label: int | None,
    gamma: float = DEFAULT_GAMMA,
    alpha: float = DEFAULT_ALPHA,
) -> float:
    """Multi-binary focal loss summed over classes.

    ``true_label`` indexes the positive class (0-based into ``pred_probs``),
    or None for a background location where every class is negative. With
    gamma = 0 and alpha = 0.5 this is half the binary cross-entropy.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must be in [0, 1]")
    if true_label is not None and not 0 <= true_label < len(pred_probs):
        raise ValueError(f"true_label {true_label} out of range")
    loss = 0.0
    for i, p in enumerate(pred_probs):
        p = _clamp(p)
        if i == true_label:
            loss += -alpha * (1.0 - p) ** gamma * math.log(p)
        else:
            loss += -(1.0 - alpha) * p**gamma * math.log(1.0 - p)
    return loss


def centerness_loss(pred: float, target: float) -> float:
    """Binary cross-entropy between predicted and target centerness."""
    if not 0 <= target <= 1:
        raise ValueError("target centerness must be in [0, 1]")
    p = _clamp(pred)
    return -target * math.log(p) - (1.0 - target) * math.log(1.0 - p)


def iou_loss(
    pred: BoxDeltas,
    target: BoxDeltas,
    loc: Location3,
    mode: DeltaMode | None = None,
) -> float:
    """1 - IoU of the boxes decoded from two delta tuples at one location.

    Uses rotated IoU for modes with angle channels, axis-aligned IoU for
    AABB deltas; either way the value is unchanged when the target box is
    replaced by an equivalent representation of itself.
    """
    if mode is None:
        mode = pred.mode
    if mode is DeltaMode.AABB:
        return 1.0 - iou_aabb(decode_aabb(pred, loc), decode_aabb(target, loc))
    return 1.0 - iou_obb(decode_obb(pred, loc, mode), decode_obb(target, loc, mode))


def total_loss(
    predictions: Sequence[LocationPrediction],
    targets: Sequence[AssignmentTarget | None],
    gamma: float = DEFAULT_GAMMA,
    alpha: float = DEFAULT_ALPHA,
) -> LossBreakdown:
    """Normalized scene loss over aligned prediction/target collections.

    ``targets[i]`` is None for background locations. Classification is summed
    over all locations; regression and centerness only where a target exists.
    All three sums are divided by the foreground count. An all-background
    scene returns zeros with ``empty_scene=True`` instead of dividing by zero.
    """
    if len(predictions) != len(targets):
        raise ValueError(
            f"{len(predictions)} predictions vs {len(targets)} targets"
        )
    n_pos = sum(1 for t in targets if t is not None)
    if n_pos == 0:
        return LossBreakdown(0.0, 0.0, 0.0, 0.0, 0, empty_scene=True)
    cls = reg = cntr = 0.0
    for pred, tgt in zip(predictions, targets):
        if tgt is None:
            cls += focal_loss(pred.class_probs, None, gamma, alpha)
            continue
        label_index = tgt.class_label - 1  # labels are 1-based, 0 = background
        if not 0 <= label_index < len(pred.class_probs):
            raise ValueError(f"class label {tgt.class_label} out of range")
        cls += focal_loss(pred.class_probs, label_index, gamma, alpha)
        if pred.deltas is None or pred.centerness is None:
            raise ValueError("foreground prediction lacks deltas or centerness")
        reg += iou_loss(pred.deltas, tgt.deltas, tgt.location)
        cntr += centerness_loss(pred.centerness, tgt.centerness)
    cls /= n_pos
    reg /= n_pos
    cntr /= n_pos
    return LossBreakdown(cls, reg, cntr, cls + reg + cntr, n_pos)


_DELTA_FIELDS = ("d1", "d2", "d3", "d4", "d5", "d6", "d7", "d8")


def fd_gradient(
    loss_fn: Callable[[BoxDeltas], float], deltas: BoxDeltas, step: float
) -> list[float]:
    """Central finite differences of a delta-valued loss, one per channel."""
    if not step > 0:
        raise ValueError("step must be positive")
    grad = []
    for name in _DELTA_FIELDS:
        v = getattr(deltas, name)
        hi = loss_fn(replace(deltas, **{name: v + step}))
        lo = loss_fn(replace(deltas, **{name: v - step}))
        grad.append((hi - lo) / (2 * step))
    return grad


def iou_loss_grad_aabb(
    pred: BoxDeltas, target: BoxDeltas, loc: Location3
) -> list[float]:
    """Analytic gradient of the axis-aligned IoU loss w.r.t. the predicted deltas.

    Valid away from face-contact configurations, where the underlying min/max
    selections are non-differentiable. Angle channels get zero gradient.
    """
    if pred.mode is not DeltaMode.AABB or target.mode is not DeltaMode.AABB:
        raise ValueError("analytic gradient is defined for AABB deltas only")
    p = pred.face_distances()
    t = target.face_distances()
    # Per axis: predicted interval [-p_lo, p_hi] and target [-t_lo, t_hi]
    # around the location (offsets cancel). d(hi) = d1, d3, d5; d(lo) = d2, d4, d6.
    overlaps = []
    for ax in range(3):
        hi = min(p[2 * ax], t[2 * ax])
        lo = min(p[2 * ax + 1], t[2 * ax + 1])  # distances below the location
        overlaps.append(max(0.0, hi + lo))
    inter = overlaps[0] * overlaps[1] * overlaps[2]
    vol_p = (p[0] + p[1]) * (p[2] + p[3]) * (p[4] + p[5])
    vol_t = (t[0] + t[1]) * (t[2] + t[3]) * (t[4] + t[5])
    union = vol_p + vol_t - inter
    grad = [0.0] * 8
    for k in range(6):
        ax = k // 2
        # d(inter)/d(delta_k): 1 on this axis if the predicted face is the
        # binding one and the boxes overlap, times the other axes' overlaps.
        if inter > 0 and p[k] < t[k]:
            d_ext = 1.0
        else:
            d_ext = 0.0
        others = 1.0
        for j in range(3):
            if j != ax:
                others *= overlaps[j]
        d_inter = d_ext * others if inter > 0 else 0.0
        # d(vol_p)/d(delta_k) = product of the other two axes' extents.
        d_vol = 1.0
        for j in range(3):
            if j != ax:
                d_vol *= p[2 * j] + p[2 * j + 1]
        d_union = d_vol - d_inter
        d_iou = (d_inter * union - inter * d_union) / (union * union)
        grad[k] = -d_iou
    return grad
