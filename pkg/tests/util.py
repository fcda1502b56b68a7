"""Shared random generators for the test suite."""

from __future__ import annotations

import math

import numpy as np

from obbdet.boxes import OrientedBox3


def random_obb(
    rng: np.random.Generator,
    center_range: float = 3.0,
    min_ext: float = 0.2,
    max_ext: float = 2.5,
) -> OrientedBox3:
    x, y, z = rng.uniform(-center_range, center_range, size=3)
    w, l, h = rng.uniform(min_ext, max_ext, size=3)
    theta = rng.uniform(-math.pi, math.pi)
    return OrientedBox3(x, y, z, w, l, h, theta)


def equivalence_class(box: OrientedBox3) -> list[OrientedBox3]:
    """The four representations of one oriented box."""
    return [
        box,
        OrientedBox3(box.x, box.y, box.z, box.l, box.w, box.h, box.theta + math.pi / 2),
        OrientedBox3(box.x, box.y, box.z, box.w, box.l, box.h, box.theta + math.pi),
        OrientedBox3(
            box.x, box.y, box.z, box.l, box.w, box.h, box.theta + 3 * math.pi / 2
        ),
    ]
