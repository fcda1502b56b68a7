"""Box <-> regression-delta codecs for four heading-angle parametrizations.

A location inside a box is described by six face distances (d1..d6) plus up
to two angle channels (d7, d8) whose meaning depends on the mode:

* ``AABB``   - no angle channels; boxes are axis-aligned.
* ``NAIVE``  - d7 is the raw heading angle, d8 unused.
* ``SINCOS`` - (d7, d8) = (sin theta, cos theta).
* ``MOBIUS`` - (d7, d8) = (ln(w/l) sin 2theta, ln(w/l) cos 2theta): the
  planar pseudo-embedding of the (aspect ratio, angle) Mobius strip. All four
  representations of the same oriented box collapse to one point, which is
  what makes a rotated-IoU regression target well defined for objects whose
  annotated heading is arbitrary.

For the oriented modes, face distances are measured in the box's own frame
(footprint rotated back by theta), so d1 + d2 == w and d3 + d4 == l hold
regardless of rotation. MOBIUS encoding canonicalizes the box first (w >= l,
theta in (-pi/2, pi/2]) so that decoding, which always lands on the q >= 1
branch, recovers the same local frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from obbdet.boxes import AxisAlignedBox3, Location3, OrientedBox3


class DeltaMode(str, Enum):
    AABB = "aabb"
    NAIVE = "naive"
    SINCOS = "sincos"
    MOBIUS = "mobius"


@dataclass(frozen=True)
class BoxDeltas:
    """Regression target/output: six face distances plus angle channels."""

    d1: float
    d2: float
    d3: float
    d4: float
    d5: float
    d6: float
    d7: float = 0.0
    d8: float = 0.0
    mode: DeltaMode = DeltaMode.AABB

    def face_distances(self) -> tuple[float, float, float, float, float, float]:
        return (self.d1, self.d2, self.d3, self.d4, self.d5, self.d6)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.d1, self.d2, self.d3, self.d4, self.d5, self.d6, self.d7, self.d8)


@dataclass(frozen=True)
class MobiusPoint:
    """4D embedding (ln q sin 2t, ln q cos 2t, sin 4t, cos 4t) of (q, t)."""

    e1: float
    e2: float
    e3: float
    e4: float


def mobius_embed(q: float, theta: float) -> MobiusPoint:
    """Embed an (aspect ratio, heading angle) pair into 4D Euclidean space.

    The four equivalent representations (q, t), (1/q, t + pi/2), (q, t + pi)
    and (1/q, t + 3pi/2) of one oriented box map to the same point.

    Raises ``ValueError`` for q <= 0.
    """
    if not q > 0:
        raise ValueError(f"aspect ratio must be positive, got {q}")
    lq = math.log(q)
    return MobiusPoint(
        lq * math.sin(2 * theta),
        lq * math.cos(2 * theta),
        math.sin(4 * theta),
        math.cos(4 * theta),
    )


def canonicalize_obb(box: OrientedBox3) -> OrientedBox3:
    """Deterministic representative of a box's four-element equivalence class.

    Ensures w >= l and theta in (-pi/2, pi/2]; for square footprints (w == l)
    theta is further normalized to (-pi/4, pi/4]. Idempotent, and the result
    has rotated IoU 1 against the input.
    """
    w, l, theta = box.w, box.l, box.theta
    if l > w:
        w, l = l, w
        theta += math.pi / 2
    if w == l:
        half = math.pi / 2
        theta = math.remainder(theta, half)
        if theta <= -half / 2:
            theta += half
    else:
        theta = math.remainder(theta, math.pi)
        if theta <= -math.pi / 2:
            theta += math.pi
    return OrientedBox3(box.x, box.y, box.z, w, l, box.h, theta)


def _face_distances_local(
    w: float, l: float, h: float, ox: float, oy: float, oz: float
) -> tuple[float, float, float, float, float, float]:
    d1 = w / 2 - ox
    d2 = ox + w / 2
    d3 = l / 2 - oy
    d4 = oy + l / 2
    d5 = h / 2 - oz
    d6 = oz + h / 2
    if min(d1, d2, d3, d4, d5, d6) < 0:
        raise ValueError("location lies outside the box")
    return (d1, d2, d3, d4, d5, d6)


def encode_aabb(box: AxisAlignedBox3, loc: Location3) -> BoxDeltas:
    """Six signed face distances of a location inside an axis-aligned box.

    d1 + d2 == w, d3 + d4 == l, d5 + d6 == h; all distances are nonnegative
    for locations inside the box, else ``ValueError``.
    """
    d = _face_distances_local(
        box.w, box.l, box.h, loc.x - box.x, loc.y - box.y, loc.z - box.z
    )
    return BoxDeltas(*d, mode=DeltaMode.AABB)


def decode_aabb(deltas: BoxDeltas, loc: Location3) -> AxisAlignedBox3:
    """Exact inverse of ``encode_aabb``."""
    if deltas.mode is not DeltaMode.AABB:
        raise ValueError(f"expected AABB deltas, got mode {deltas.mode.value}")
    d1, d2, d3, d4, d5, d6 = deltas.face_distances()
    if min(d1, d2, d3, d4, d5, d6) < 0:
        raise ValueError("face distances must be nonnegative")
    w = d1 + d2
    l = d3 + d4
    h = d5 + d6
    if not (w > 0 and l > 0 and h > 0):
        raise ValueError("degenerate extents decoded from deltas")
    return AxisAlignedBox3(
        loc.x + (d1 - d2) / 2, loc.y + (d3 - d4) / 2, loc.z + (d5 - d6) / 2, w, l, h
    )


def encode_obb(box: OrientedBox3, loc: Location3, mode: DeltaMode) -> BoxDeltas:
    """Encode an oriented box relative to a location inside its footprint."""
    if mode is DeltaMode.AABB:
        raise ValueError("use encode_aabb for axis-aligned boxes")
    if mode is DeltaMode.MOBIUS:
        box = canonicalize_obb(box)
    c = math.cos(box.theta)
    s = math.sin(box.theta)
    rx = loc.x - box.x
    ry = loc.y - box.y
    ox = c * rx + s * ry
    oy = -s * rx + c * ry
    d = _face_distances_local(box.w, box.l, box.h, ox, oy, loc.z - box.z)
    if mode is DeltaMode.NAIVE:
        d7, d8 = box.theta, 0.0
    elif mode is DeltaMode.SINCOS:
        d7, d8 = math.sin(box.theta), math.cos(box.theta)
    else:
        lr = math.log(box.w / box.l)
        d7 = lr * math.sin(2 * box.theta)
        d8 = lr * math.cos(2 * box.theta)
    return BoxDeltas(*d, d7, d8, mode=mode)


def decode_obb(
    deltas: BoxDeltas, loc: Location3, mode: DeltaMode | None = None
) -> OrientedBox3:
    """Decode oriented-box deltas at a location.

    MOBIUS decoding recovers size s = d1+d2+d3+d4, ratio q = e^sqrt(d7^2+d8^2)
    and the canonical (q >= 1) representative with theta = atan2(d7, d8) / 2;
    the round trip through ``encode_obb`` therefore reproduces the input box
    up to the representation equivalence (rotated IoU 1), not field equality.
    A (0, 0) angle channel - the strip's center circle, i.e. a square
    footprint - decodes to theta = 0.
    """
    if mode is None:
        mode = deltas.mode
    if mode is DeltaMode.AABB:
        raise ValueError("use decode_aabb for axis-aligned deltas")
    d1, d2, d3, d4, d5, d6 = deltas.face_distances()
    if min(d1, d2, d3, d4, d5, d6) < 0:
        raise ValueError("face distances must be nonnegative")
    h = d5 + d6
    if mode is DeltaMode.MOBIUS:
        s = d1 + d2 + d3 + d4
        if not (s > 0 and h > 0):
            raise ValueError("degenerate extents decoded from deltas")
        q = math.exp(math.sqrt(deltas.d7 * deltas.d7 + deltas.d8 * deltas.d8))
        w = s * q / (1 + q)
        l = s / (1 + q)
        # atan2 rather than arctan(d7/d8): defined at d8 == 0, correct on the
        # whole circle, and atan2(0, 0) == 0 handles the square-footprint case.
        theta = 0.5 * math.atan2(deltas.d7, deltas.d8)
    else:
        w = d1 + d2
        l = d3 + d4
        if not (w > 0 and l > 0 and h > 0):
            raise ValueError("degenerate extents decoded from deltas")
        if mode is DeltaMode.NAIVE:
            theta = deltas.d7
        else:
            # Scale of (d7, d8) is irrelevant to atan2, which amounts to
            # renormalizing non-unit network outputs.
            if deltas.d7 == 0.0 and deltas.d8 == 0.0:
                raise ValueError("sincos deltas need a nonzero (d7, d8)")
            theta = math.atan2(deltas.d7, deltas.d8)
    # Center offset in the box frame, rotated back to world coordinates.
    vx = (d1 - d2) / 2
    vy = (d3 - d4) / 2
    c = math.cos(theta)
    sn = math.sin(theta)
    return OrientedBox3(
        loc.x + c * vx - sn * vy,
        loc.y + sn * vx + c * vy,
        loc.z + (d5 - d6) / 2,
        w,
        l,
        h,
        theta,
    )
