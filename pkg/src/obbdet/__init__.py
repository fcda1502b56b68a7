"""Anchor-free 3D oriented-box detection toolkit.

Pure-python reference implementations of the non-neural parts of an
anchor-free sparse-voxel 3D detector: box parametrizations (including the
angle-ambiguity-free ratio/angle embedding), rotated IoU, multi-level target
assignment, detection losses, centerness-weighted NMS and mAP evaluation.
"""

from obbdet.boxes import (
    AxisAlignedBox3,
    Location3,
    OrientedBox3,
    centerness3d,
    iou_aabb,
    iou_obb,
    volume,
)
from obbdet.parametrize import (
    BoxDeltas,
    DeltaMode,
    MobiusPoint,
    canonicalize_obb,
    decode_aabb,
    decode_obb,
    encode_aabb,
    encode_obb,
    mobius_embed,
)
from obbdet.voxels import (
    LevelSpec,
    PointCloud,
    SparseVoxelSet,
    level_locations,
    prune_topk,
    voxelize,
)
from obbdet.assign import (
    AssignmentConfig,
    AssignmentTarget,
    assign,
    covered_locations,
    select_level,
)
from obbdet.losses import (
    LossBreakdown,
    centerness_loss,
    fd_gradient,
    focal_loss,
    iou_loss,
    iou_loss_grad_aabb,
    total_loss,
)
from obbdet.postprocess import Detection, apply_centerness, nms_rotated
from obbdet.evaluate import (
    DetectionRecord,
    EvalReport,
    GroundTruthRecord,
    average_precision,
    evaluate,
    generate_scene,
    match_detections,
)

__all__ = [
    "AxisAlignedBox3",
    "OrientedBox3",
    "Location3",
    "volume",
    "iou_aabb",
    "iou_obb",
    "centerness3d",
    "BoxDeltas",
    "DeltaMode",
    "MobiusPoint",
    "encode_aabb",
    "decode_aabb",
    "encode_obb",
    "decode_obb",
    "mobius_embed",
    "canonicalize_obb",
    "PointCloud",
    "SparseVoxelSet",
    "LevelSpec",
    "voxelize",
    "level_locations",
    "prune_topk",
    "AssignmentConfig",
    "AssignmentTarget",
    "covered_locations",
    "select_level",
    "assign",
    "LossBreakdown",
    "focal_loss",
    "iou_loss",
    "centerness_loss",
    "total_loss",
    "fd_gradient",
    "iou_loss_grad_aabb",
    "Detection",
    "apply_centerness",
    "nms_rotated",
    "DetectionRecord",
    "GroundTruthRecord",
    "EvalReport",
    "match_detections",
    "average_precision",
    "evaluate",
    "generate_scene",
]

__version__ = "0.1.0"
