"""Command-line surface: encode, decode, iou, assign, nms, eval, gen.

Text formats (whitespace-separated, '#' comments, locale-independent
decimals, angles in radians):

* box records:        "scene_id class_id x y z w l h theta"
  (encode input also accepts three trailing fields "lx ly lz" giving a
  per-record encoding location; default is the box center)
* delta records:      "scene_id class_id lx ly lz d1 d2 d3 d4 d5 d6 d7 d8"
  with optional trailing "score" and "level box_id" columns; ``assign``
  emits the full 16-column form with centerness in the score column
* detection records:  "scene_id class_id score x y z w l h theta"

Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from typing import Iterable, Sequence, TextIO

from obbdet.assign import AssignmentConfig, assign
from obbdet.boxes import AxisAlignedBox3, OrientedBox3, iou_aabb, iou_obb
from obbdet.evaluate import (
    DetectionRecord,
    evaluate,
    format_detection,
    format_ground_truth,
    generate_scene,
    match_detections,
    pr_curve,
    read_detections,
    read_ground_truth,
)
from obbdet.parametrize import (
    BoxDeltas,
    DeltaMode,
    decode_aabb,
    decode_obb,
    encode_aabb,
    encode_obb,
)
from obbdet.boxes import Location3
from obbdet.postprocess import nms_rotated
from obbdet.voxels import (
    LevelSpec,
    level_locations,
    load_point_cloud,
    prune_topk,
    save_point_cloud,
    voxelize,
)

# Default hyperparameters.
DEFAULTS = {
    "voxel_size": 0.01,
    "n_pts": 100_000,
    "n_vox": 100_000,
    "n_loc": 27,
    "center_sample_k": 18,
    "nms_iou": 0.5,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage problems are input errors
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    if v == 0:
        v = 0.0  # avoid "-0.000000"
    return f"{v:.6f}"


def _open_in(path: str) -> TextIO:
    return sys.stdin if path == "-" else open(path, "r", encoding="utf-8")


def _data_lines(source: TextIO) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _parse_csv_floats(text: str, expected: tuple[int, ...], what: str) -> list[float]:
    parts = text.split(",")
    if len(parts) not in expected:
        raise ValueError(f"{what}: expected {expected} comma-separated values")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"{what}: malformed float in {text!r}") from None


def _mode(text: str) -> DeltaMode:
    try:
        return DeltaMode(text)
    except ValueError:
        raise ValueError(
            f"unknown mode {text!r} (choose from aabb, naive, sincos, mobius)"
        ) from None


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_encode(args: argparse.Namespace) -> int:
    mode = _mode(args.mode)
    loc_override = (
        Location3(*_parse_csv_floats(args.location, (3,), "--location"))
        if args.location
        else None
    )
    out = sys.stdout
    with _open_in(args.input) as fh:
        for lineno, parts in _data_lines(fh):
            if len(parts) not in (9, 12):
                raise ValueError(
                    f"line {lineno}: expected 9 or 12 fields, got {len(parts)}"
                )
            try:
                label = int(parts[1])
                vals = [float(p) for p in parts[2:]]
            except ValueError:
                raise ValueError(f"line {lineno}: malformed number") from None
            try:
                box = OrientedBox3(*vals[:7])
                if loc_override is not None:
                    loc = loc_override
                elif len(vals) == 10:
                    loc = Location3(*vals[7:])
                else:
                    loc = Location3(box.x, box.y, box.z)
                if mode is DeltaMode.AABB:
                    if box.theta != 0:
                        raise ValueError("aabb mode requires theta == 0")
                    deltas = encode_aabb(box.as_aabb(), loc)
                else:
                    deltas = encode_obb(box, loc, mode)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            nums = [loc.x, loc.y, loc.z, *deltas.as_tuple()]
            out.write(f"{parts[0]} {label} " + " ".join(_fmt(v) for v in nums) + "\n")
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    mode = _mode(args.mode)
    out = sys.stdout
    with _open_in(args.input) as fh:
        for lineno, parts in _data_lines(fh):
            if len(parts) not in (13, 14, 16):
                raise ValueError(
                    f"line {lineno}: expected 13, 14 or 16 fields, got {len(parts)}"
                )
            try:
                label = int(parts[1])
                vals = [float(p) for p in parts[2:14]]
                score = float(parts[13]) if len(parts) >= 14 else 1.0
            except ValueError:
                raise ValueError(f"line {lineno}: malformed number") from None
            loc = Location3(*vals[:3])
            deltas = BoxDeltas(*vals[3:11], mode=mode)
            try:
                if mode is DeltaMode.AABB:
                    aabb = decode_aabb(deltas, loc)
                    box = OrientedBox3(
                        aabb.x, aabb.y, aabb.z, aabb.w, aabb.l, aabb.h, 0.0
                    )
                else:
                    box = decode_obb(deltas, loc, mode)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            fields = [box.x, box.y, box.z, box.w, box.l, box.h, box.theta]
            if args.with_scores:
                fields.insert(0, score)
            out.write(f"{parts[0]} {label} " + " ".join(_fmt(v) for v in fields) + "\n")
    return 0


def _parse_box(text: str, what: str) -> OrientedBox3:
    vals = _parse_csv_floats(text, (6, 7), what)
    if len(vals) == 6:
        vals.append(0.0)
    return OrientedBox3(*vals)


def _cmd_iou(args: argparse.Namespace) -> int:
    a = _parse_box(args.box_a, "--box-a")
    b = _parse_box(args.box_b, "--box-b")
    if args.rotated:
        value = iou_obb(a, b)
    else:
        value = iou_aabb(a.as_aabb(), b.as_aabb())
    print(_fmt(value))
    return 0


def _cmd_assign(args: argparse.Namespace) -> int:
    cloud = load_point_cloud(args.cloud)
    gts = read_ground_truth(args.gt)
    if not gts:
        raise ValueError("ground-truth file contains no boxes")
    mode = _mode(args.mode)
    spec = LevelSpec(args.voxel_size, args.levels, args.first_stride)
    base = voxelize(cloud, args.voxel_size)
    if len(base) > args.n_vox:
        # No classification scores at this stage: uniform scores make the cap
        # a deterministic lexicographic truncation.
        base = prune_topk(base.with_scores({v: 1.0 for v in base.voxels}), args.n_vox)
    levels = [level_locations(base, spec, lvl) for lvl in range(args.levels)]
    cfg = AssignmentConfig(n_loc=args.n_loc, center_sample_k=args.k)
    targets = assign([g.box for g in gts], [g.class_label for g in gts], levels, cfg, mode)
    out = sys.stdout
    scene = gts[0].scene_id
    for t in targets:
        nums = [t.location.x, t.location.y, t.location.z, *t.deltas.as_tuple(), t.centerness]
        out.write(
            f"{scene} {t.class_label} "
            + " ".join(_fmt(v) for v in nums)
            + f" {t.level} {t.box_id}\n"
        )
    return 0


def _cmd_nms(args: argparse.Namespace) -> int:
    records = read_detections(args.input) if args.input != "-" else read_detections(sys.stdin)
    by_scene: dict[str, list[DetectionRecord]] = {}
    order: list[str] = []
    for r in records:
        if r.scene_id not in by_scene:
            order.append(r.scene_id)
        by_scene.setdefault(r.scene_id, []).append(r)
    out = sys.stdout
    for scene in order:
        recs = by_scene[scene]
        from obbdet.postprocess import Detection

        dets = [Detection(r.class_label, r.score, r.box) for r in recs]
        kept = nms_rotated(dets, args.iou_threshold)
        for det in kept:
            out.write(
                format_detection(
                    DetectionRecord(scene, det.class_label, det.score, det.box)
                )
                + "\n"
            )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    dets = read_detections(args.dets) if args.dets != "-" else read_detections(sys.stdin)
    gts = read_ground_truth(args.gt)
    thresholds = _parse_csv_floats(args.thresholds, (1, 2, 3, 4), "--thresholds")
    report = evaluate(dets, gts, thresholds, rotated=args.rotated)
    sys.stdout.write(report.format())
    if args.pr_out:
        classes = sorted({g.class_label for g in gts})
        for t in sorted(set(thresholds)):
            flags = match_detections(dets, gts, t, args.rotated)
            for c in classes:
                idx = [i for i, d in enumerate(dets) if d.class_label == c]
                n_gt = sum(1 for g in gts if g.class_label == c)
                curve = pr_curve(
                    [flags[i] for i in idx], [dets[i].score for i in idx], n_gt
                )
                path = f"{args.pr_out}_c{c}_t{t:g}.txt"
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write("# recall precision\n")
                    for rec, prec in curve:
                        fh.write(f"{_fmt(rec)} {_fmt(prec)}\n")
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    room = tuple(_parse_csv_floats(args.room, (3,), "--room"))
    cloud, gts = generate_scene(
        seed=args.seed,
        room=room,  # type: ignore[arg-type]
        num_classes=args.classes,
        num_boxes=args.boxes,
        points_per_box=args.points,
        clutter_points=args.clutter,
        rotated=not args.axis_aligned,
        scene_id=args.scene_id,
    )
    save_point_cloud(cloud, args.cloud_out)
    with open(args.gt_out, "w", encoding="utf-8") as fh:
        for gt in gts:
            fh.write(format_ground_truth(gt) + "\n")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="obbdet", description=__doc__)
    parser.add_argument(
        "--config", help="JSON file overriding flag defaults", default=None
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="box records -> delta records")
    p.add_argument("input", help="box record file, or - for stdin")
    p.add_argument("--mode", default="mobius", help="aabb|naive|sincos|mobius")
    p.add_argument("--location", default=None, help="x,y,z overriding all locations")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="delta records -> box records")
    p.add_argument("input", help="delta record file, or - for stdin")
    p.add_argument("--mode", default="mobius", help="aabb|naive|sincos|mobius")
    p.add_argument(
        "--with-scores",
        action="store_true",
        help="emit detection records (score column from input, default 1.0)",
    )
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("iou", help="IoU of two boxes")
    p.add_argument("--box-a", required=True, help="x,y,z,w,l,h[,theta]")
    p.add_argument("--box-b", required=True, help="x,y,z,w,l,h[,theta]")
    p.add_argument("--rotated", action="store_true", help="use rotated IoU")
    p.set_defaults(func=_cmd_iou)

    p = sub.add_parser("assign", help="scene + ground truth -> target records")
    p.add_argument("cloud", help="point cloud file (x y z r g b)")
    p.add_argument("gt", help="ground-truth box record file")
    p.add_argument("--voxel-size", type=float, default=DEFAULTS["voxel_size"])
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--first-stride", type=int, default=2, choices=(1, 2))
    p.add_argument("--n-loc", type=int, default=DEFAULTS["n_loc"])
    p.add_argument("--k", type=int, default=DEFAULTS["center_sample_k"])
    p.add_argument("--n-vox", type=int, default=DEFAULTS["n_vox"])
    p.add_argument("--mode", default="mobius", help="aabb|naive|sincos|mobius")
    p.set_defaults(func=_cmd_assign)

    p = sub.add_parser("nms", help="suppress overlapping detections per scene")
    p.add_argument("input", help="detection record file, or - for stdin")
    p.add_argument("--iou-threshold", type=float, default=DEFAULTS["nms_iou"])
    p.set_defaults(func=_cmd_nms)

    p = sub.add_parser("eval", help="mAP report for detections vs ground truth")
    p.add_argument("dets", help="detection record file, or - for stdin")
    p.add_argument("gt", help="ground-truth box record file")
    p.add_argument("--thresholds", default="0.25,0.5")
    p.add_argument("--rotated", action="store_true", help="use rotated IoU")
    p.add_argument("--pr-out", default=None, help="prefix for PR-curve data files")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("gen", help="write a synthetic scene")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--boxes", type=int, default=5)
    p.add_argument("--points", type=int, default=200, help="points per box")
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--clutter", type=int, default=500)
    p.add_argument("--room", default="6,6,3")
    p.add_argument("--axis-aligned", action="store_true")
    p.add_argument("--scene-id", default="scene0")
    p.add_argument("--cloud-out", required=True)
    p.add_argument("--gt-out", required=True)
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                overrides = json.load(fh)
            for key, value in overrides.items():
                if hasattr(args, key):
                    setattr(args, key, value)
                else:
                    raise ValueError(f"unknown config key {key!r}")
        except (OSError, json.JSONDecodeError) as exc:
            print(f"obbdet: error: {exc}", file=sys.stderr)
            return 1
        except ValueError as exc:
            print(f"obbdet: error: {exc}", file=sys.stderr)
            return 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"obbdet: error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # internal invariant violation
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
