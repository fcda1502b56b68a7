"""3D box types, axis-aligned and rotated IoU, and 3D centerness.

Boxes rotate about the vertical (z) axis only. The rotated IoU intersects the
two xy footprints as convex polygons (Sutherland-Hodgman clipping) and
multiplies by the z-interval overlap, so its value is identical for every
representation of the same physical box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

# Squared-distance tolerance for merging clip vertices (m^2).
_MERGE_EPS_SQ = 1e-12

# Relative half-plane tolerance for the clip inside test. Vertices within
# this (scaled) distance of a clip edge count as inside; without it, two
# nearly collinear edges produce an ill-conditioned intersection point that
# can shave an O(1e-7) sliver off the area of near-identical footprints.
_INSIDE_REL_EPS = 1e-12


def _check_extents(w: float, l: float, h: float) -> None:
    if not (w > 0 and l > 0 and h > 0):
        raise ValueError(f"box extents must be positive, got w={w}, l={l}, h={h}")


@dataclass(frozen=True)
class AxisAlignedBox3:
    """Axis-aligned box: center (x, y, z) and extents (w, l, h), in meters."""

    x: float
    y: float
    z: float
    w: float
    l: float
    h: float

    def __post_init__(self) -> None:
        _check_extents(self.w, self.l, self.h)


@dataclass(frozen=True)
class OrientedBox3:
    """Oriented box: center, extents and heading angle theta (radians).

    theta rotates the footprint about the z axis. It is stored unconstrained;
    boxes that differ by the (q, theta) four-fold representation ambiguity
    describe the same physical volume and compare equal under ``iou_obb``.
    """

    x: float
    y: float
    z: float
    w: float
    l: float
    h: float
    theta: float

    def __post_init__(self) -> None:
        _check_extents(self.w, self.l, self.h)

    def as_aabb(self) -> AxisAlignedBox3:
        """Drop the heading angle (valid view only when theta == 0)."""
        return AxisAlignedBox3(self.x, self.y, self.z, self.w, self.l, self.h)


@dataclass(frozen=True)
class Location3:
    """A head-output location in world coordinates (meters)."""

    x: float
    y: float
    z: float


def volume(box: OrientedBox3 | AxisAlignedBox3) -> float:
    """Box volume in cubic meters (always positive)."""
    return box.w * box.l * box.h


def iou_aabb(a: AxisAlignedBox3, b: AxisAlignedBox3) -> float:
    """Intersection over union of two axis-aligned boxes, in [0, 1]."""
    ix = min(a.x + a.w / 2, b.x + b.w / 2) - max(a.x - a.w / 2, b.x - b.w / 2)
    iy = min(a.y + a.l / 2, b.y + b.l / 2) - max(a.y - a.l / 2, b.y - b.l / 2)
    iz = min(a.z + a.h / 2, b.z + b.h / 2) - max(a.z - a.h / 2, b.z - b.h / 2)
    if ix <= 0 or iy <= 0 or iz <= 0:
        return 0.0
    inter = ix * iy * iz
    union = volume(a) + volume(b) - inter
    return min(max(inter / union, 0.0), 1.0)


def footprint_corners(box: OrientedBox3) -> list[tuple[float, float]]:
    """The four xy corners of the rotated footprint, counter-clockwise."""
    c = math.cos(box.theta)
    s = math.sin(box.theta)
    hw = box.w / 2
    hl = box.l / 2
    return [
        (box.x + c * dx - s * dy, box.y + s * dx + c * dy)
        for dx, dy in ((hw, hl), (-hw, hl), (-hw, -hl), (hw, -hl))
    ]


def _clip_convex(
    subject: Sequence[tuple[float, float]], clip: Sequence[tuple[float, float]]
) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clip of a convex polygon by a CCW convex polygon."""
    output = list(subject)
    n = len(clip)
    for i in range(n):
        if not output:
            return []
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]
        ex = bx - ax
        ey = by - ay
        scale = abs(ex) + abs(ey)

        def _inside(px: float, py: float) -> bool:
            cross = ex * (py - ay) - ey * (px - ax)
            # The edge length enters the scale so that vertices coincident
            # with the edge origin still get a nonzero tolerance.
            return cross >= -_INSIDE_REL_EPS * scale * (
                scale + abs(px - ax) + abs(py - ay)
            )

        points = output
        output = []
        px, py = points[-1]
        prev_in = _inside(px, py)
        for cx, cy in points:
            cur_in = _inside(cx, cy)
            if cur_in != prev_in:
                # Intersection of segment (p, c) with the clip edge line.
                sx = cx - px
                sy = cy - py
                denom = ex * sy - ey * sx
                if denom != 0.0:
                    t = ((ax - px) * ey - (ay - py) * ex) / -denom
                    output.append((px + t * sx, py + t * sy))
            if cur_in:
                output.append((cx, cy))
            px, py, prev_in = cx, cy, cur_in
    return _merge_close(output)


def _merge_close(poly: list[tuple[float, float]]) -> list[tuple[float, float]]:
    if len(poly) < 2:
        return poly
    out: list[tuple[float, float]] = []
    for p in poly:
        if out:
            dx = p[0] - out[-1][0]
            dy = p[1] - out[-1][1]
            if dx * dx + dy * dy < _MERGE_EPS_SQ:
                continue
        out.append(p)
    if len(out) > 1:
        dx = out[0][0] - out[-1][0]
        dy = out[0][1] - out[-1][1]
        if dx * dx + dy * dy < _MERGE_EPS_SQ:
            out.pop()
    return out


def _polygon_area(poly: Sequence[tuple[float, float]]) -> float:
    if len(poly) < 3:
        return 0.0
    acc = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2.0


def iou_obb(a: OrientedBox3, b: OrientedBox3) -> float:
    """Rotated intersection over union of two z-oriented boxes, in [0, 1]."""
    dz = min(a.z + a.h / 2, b.z + b.h / 2) - max(a.z - a.h / 2, b.z - b.h / 2)
    if dz <= 0:
        return 0.0
    # Cheap reject: footprints cannot intersect beyond their circumcircles.
    dx = a.x - b.x
    dy = a.y - b.y
    ra = math.hypot(a.w, a.l) / 2
    rb = math.hypot(b.w, b.l) / 2
    if dx * dx + dy * dy > (ra + rb) * (ra + rb):
        return 0.0
    inter_poly = _clip_convex(footprint_corners(a), footprint_corners(b))
    area = _polygon_area(inter_poly)
    if area <= 0.0:
        return 0.0
    inter = area * dz
    union = volume(a) + volume(b) - inter
    return min(max(inter / union, 0.0), 1.0)


def centerness3d(deltas) -> float:
    """3D centerness of a location from its six face distances, in [0, 1].

    Geometric mean (cube root) over the three axes of min/max of the opposing
    face-distance pair: 1.0 at the box center, 0.0 on any face. ``deltas`` is
    a ``BoxDeltas`` or any 6-sequence of nonnegative face distances.

    Raises ``ValueError`` for negative distances (location outside the box).
    """
    if hasattr(deltas, "face_distances"):
        d = deltas.face_distances()
    else:
        d = tuple(deltas)
        if len(d) != 6:
            raise ValueError(f"expected 6 face distances, got {len(d)}")
    prod = 1.0
    for lo, hi in ((d[0], d[1]), (d[2], d[3]), (d[4], d[5])):
        if lo < 0 or hi < 0:
            raise ValueError(f"negative face distance {min(lo, hi)}: location outside box")
        m = min(lo, hi)
        big = max(lo, hi)
        if big == 0.0:
            return 0.0
        prod *= m / big
    return prod ** (1.0 / 3.0)
