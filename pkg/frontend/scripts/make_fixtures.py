#!/usr/bin/env python3
"""Generate the golden-vector parity fixtures by driving the obbdet CLI.

Inputs are written with full (%.17g) precision so both runtimes parse
identical doubles; expected outputs are the CLI's own text. Run from
anywhere; fixtures land in frontend/test/fixtures/.
"""

from __future__ import annotations

import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np

FIXTURES = Path(__file__).resolve().parent.parent / "test" / "fixtures"
CLI = [sys.executable, "-m", "obbdet.cli"]

ASSIGN_PARAMS = {
    "voxel_size": 0.05,
    "levels": 3,
    "first_stride": 1,
    "n_loc": 8,
    "k": 9,
    "n_vox": 1200,
    "mode": "mobius",
}


def g17(v: float) -> str:
    return f"{float(v):.17g}"


def run_cli(args: list[str], stdin_text: str | None = None) -> str:
    proc = subprocess.run(
        CLI + args,
        input=stdin_text,
        capture_output=True,
        text=True,
        check=False,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"CLI failed ({args}): {proc.stderr}")
    return proc.stdout


def random_box(rng: np.random.Generator, theta_zero: bool = False) -> tuple:
    x, y, z = rng.uniform(-3, 3, size=3)
    w, l, h = rng.uniform(0.2, 2.5, size=3)
    theta = 0.0 if theta_zero else float(rng.uniform(-math.pi, math.pi))
    return (float(x), float(y), float(z), float(w), float(l), float(h), theta)


def interior_location(rng: np.random.Generator, box: tuple) -> tuple:
    x, y, z, w, l, h, theta = box
    c, s = math.cos(theta), math.sin(theta)
    ox = float(rng.uniform(-0.49, 0.49)) * w
    oy = float(rng.uniform(-0.49, 0.49)) * l
    oz = float(rng.uniform(-0.49, 0.49)) * h
    return (x + c * ox - s * oy, y + s * ox + c * oy, z + oz)


def make_encode(rng: np.random.Generator) -> int:
    count = 0
    for mode in ("aabb", "naive", "sincos", "mobius"):
        lines = []
        for i in range(100):
            box = random_box(rng, theta_zero=(mode == "aabb"))
            fields = [g17(v) for v in box]
            if i % 2 == 1:
                fields += [g17(v) for v in interior_location(rng, box)]
            lines.append(f"s{i % 7} {1 + i % 5} " + " ".join(fields))
        src = FIXTURES / f"encode_{mode}.in.txt"
        src.write_text("\n".join(lines) + "\n")
        out = run_cli(["encode", str(src), "--mode", mode])
        (FIXTURES / f"encode_{mode}.expected.txt").write_text(out)
        count += 100
    return count


def make_decode(rng: np.random.Generator) -> int:
    # Valid deltas come from encoding random boxes at interior locations.
    from obbdet.boxes import Location3, OrientedBox3
    from obbdet.parametrize import DeltaMode, encode_aabb, encode_obb

    count = 0
    for mode in ("aabb", "naive", "sincos", "mobius"):
        lines = []
        for i in range(100):
            box = random_box(rng, theta_zero=(mode == "aabb"))
            loc = interior_location(rng, box)
            obox = OrientedBox3(*box)
            if mode == "aabb":
                deltas = encode_aabb(obox.as_aabb(), Location3(*loc))
            else:
                deltas = encode_obb(obox, Location3(*loc), DeltaMode(mode))
            d = list(deltas.as_tuple())
            if mode == "sincos" and i % 3 == 0:
                scale = float(rng.uniform(0.5, 4.0))
                d[6] *= scale
                d[7] *= scale
            nums = [g17(v) for v in (*loc, *d)]
            lines.append(f"s{i % 7} {1 + i % 5} " + " ".join(nums))
        src = FIXTURES / f"decode_{mode}.in.txt"
        src.write_text("\n".join(lines) + "\n")
        out = run_cli(["decode", str(src), "--mode", mode])
        (FIXTURES / f"decode_{mode}.expected.txt").write_text(out)
        count += 100
    return count


def make_iou(rng: np.random.Generator) -> int:
    in_lines = []
    out_lines = []
    for i in range(150):
        rotated = i >= 75
        a = random_box(rng, theta_zero=not rotated)
        kind = i % 3
        if kind == 0:  # identical
            b = a
        elif kind == 1:  # perturbed overlap
            b = tuple(
                v + float(d)
                for v, d in zip(a, rng.uniform(-0.3, 0.3, size=7))
            )
            b = b[:3] + tuple(max(abs(v), 0.05) for v in b[3:6]) + (
                (b[6] if rotated else 0.0),
            )
        else:  # usually disjoint
            b = random_box(rng, theta_zero=not rotated)
        args = ["iou", "--box-a=" + ",".join(g17(v) for v in a),
                "--box-b=" + ",".join(g17(v) for v in b)]
        if rotated:
            args.append("--rotated")
        out = run_cli(args).strip()
        in_lines.append(
            f"{int(rotated)} " + ",".join(g17(v) for v in a) + " " + ",".join(g17(v) for v in b)
        )
        out_lines.append(out)
    (FIXTURES / "iou.in.txt").write_text("\n".join(in_lines) + "\n")
    (FIXTURES / "iou.expected.txt").write_text("\n".join(out_lines) + "\n")
    return 150


def make_nms(rng: np.random.Generator) -> int:
    lines = []
    for scene in range(30):
        n_clusters = int(rng.integers(2, 5))
        for _ in range(n_clusters):
            base = random_box(rng)
            n_dets = int(rng.integers(1, 5))
            for _ in range(n_dets):
                jit = rng.uniform(-0.15, 0.15, size=3)
                box = (
                    base[0] + float(jit[0]),
                    base[1] + float(jit[1]),
                    base[2] + float(jit[2]),
                    base[3],
                    base[4],
                    base[5],
                    base[6] + float(rng.uniform(-0.1, 0.1)),
                )
                label = 1 + int(rng.integers(0, 3))
                score = float(rng.uniform(0.05, 1.0))
                lines.append(
                    f"s{scene:02d} {label} {g17(score)} " + " ".join(g17(v) for v in box)
                )
    src = FIXTURES / "nms.in.txt"
    src.write_text("\n".join(lines) + "\n")
    out = run_cli(["nms", str(src), "--iou-threshold", "0.5"])
    (FIXTURES / "nms.expected.txt").write_text(out)
    return 30


def make_assign(rng: np.random.Generator) -> int:
    p = ASSIGN_PARAMS
    for i in range(10):
        seed = 1000 + i
        cloud = FIXTURES / f"assign_{i:02d}.cloud.txt"
        gt = FIXTURES / f"assign_{i:02d}.gt.txt"
        run_cli([
            "gen", "--seed", str(seed), "--boxes", "4", "--points", "400",
            "--clutter", "300", "--scene-id", f"a{i:02d}",
            "--cloud-out", str(cloud), "--gt-out", str(gt),
        ])
        out = run_cli([
            "assign", str(cloud), str(gt),
            "--voxel-size", str(p["voxel_size"]), "--levels", str(p["levels"]),
            "--first-stride", str(p["first_stride"]), "--n-loc", str(p["n_loc"]),
            "--k", str(p["k"]), "--n-vox", str(p["n_vox"]), "--mode", p["mode"],
        ])
        (FIXTURES / f"assign_{i:02d}.expected.txt").write_text(out)
    return 10


def make_eval(rng: np.random.Generator) -> int:
    for i in range(10):
        seed = 2000 + i
        gt = FIXTURES / f"eval_{i:02d}.gt.txt"
        cloud = FIXTURES / "tmp_cloud.txt"
        run_cli([
            "gen", "--seed", str(seed), "--boxes", str(3 + i % 4), "--points", "50",
            "--clutter", "10", "--scene-id", f"e{i:02d}",
            "--cloud-out", str(cloud), "--gt-out", str(gt),
        ])
        gts = [line.split() for line in gt.read_text().splitlines() if line.strip()]
        det_lines = []
        for parts in gts:
            scene, label = parts[0], parts[1]
            box = [float(v) for v in parts[2:]]
            # True positive: jittered echo of the ground truth.
            jit = rng.uniform(-0.05, 0.05, size=3)
            tp = [box[0] + jit[0], box[1] + jit[1], box[2] + jit[2], *box[3:]]
            det_lines.append(
                f"{scene} {label} {g17(float(rng.uniform(0.5, 1.0)))} "
                + " ".join(g17(v) for v in tp)
            )
            if rng.uniform() < 0.5:
                # False positive: same class, shifted far away.
                fp = [box[0] + 10.0, box[1], box[2], *box[3:]]
                det_lines.append(
                    f"{scene} {label} {g17(float(rng.uniform(0.05, 0.5)))} "
                    + " ".join(g17(v) for v in fp)
                )
            if rng.uniform() < 0.3:
                # Duplicate detection of the same ground truth.
                det_lines.append(
                    f"{scene} {label} {g17(float(rng.uniform(0.05, 0.5)))} "
                    + " ".join(g17(v) for v in box)
                )
        dets = FIXTURES / f"eval_{i:02d}.dets.txt"
        dets.write_text("\n".join(det_lines) + "\n")
        out = run_cli(["eval", str(dets), str(gt), "--rotated"])
        (FIXTURES / f"eval_{i:02d}.expected.txt").write_text(out)
    (FIXTURES / "tmp_cloud.txt").unlink(missing_ok=True)
    return 10


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20260825)
    counts = {
        "encode": make_encode(rng),
        "decode": make_decode(rng),
        "iou": make_iou(rng),
        "nms": make_nms(rng),
        "assign": make_assign(rng),
        "eval": make_eval(rng),
    }
    manifest = {"cases": counts, "total": sum(counts.values()), "assign_params": ASSIGN_PARAMS}
    (FIXTURES / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(json.dumps(manifest, indent=2))


if __name__ == "__main__":
    main()
