/**
 * Flat-array binding surface for training-loop callers.
 *
 * Boxes travel as row-major buffers with 7 values per box
 * (x, y, z, w, l, h, theta); deltas as 8 per row; locations as 3 per row.
 * All functions are stateless and validate buffer shapes up front.
 */

import { Box, centerness3d, iouAabb, iouObb } from "./boxes.js";
import {
  Deltas,
  DeltaMode,
  decodeAabb,
  decodeObb,
  encodeAabb,
  encodeObb,
} from "./parametrize.js";
import { Detection, nmsRotated } from "./postprocess.js";
import {
  DetectionRecord,
  EvalReport,
  GroundTruthRecord,
  evaluate,
} from "./evaluate.js";

export type FlatArray = Float64Array | number[];

function checkStride(buf: FlatArray, stride: number, what: string): number {
  if (buf.length % stride !== 0) {
    throw new RangeError(`${what}: length ${buf.length} not divisible by ${stride}`);
  }
  return buf.length / stride;
}

function boxAt(buf: FlatArray, i: number): Box {
  const o = i * 7;
  return {
    x: buf[o]!,
    y: buf[o + 1]!,
    z: buf[o + 2]!,
    w: buf[o + 3]!,
    l: buf[o + 4]!,
    h: buf[o + 5]!,
    theta: buf[o + 6]!,
  };
}

export function bindEncode(boxes: FlatArray, locs: FlatArray, mode: DeltaMode): Float64Array {
  const n = checkStride(boxes, 7, "boxes");
  if (checkStride(locs, 3, "locs") !== n) {
    throw new RangeError(`boxes (${n}) and locs (${locs.length / 3}) count mismatch`);
  }
  const out = new Float64Array(n * 8);
  for (let i = 0; i < n; i++) {
    const box = boxAt(boxes, i);
    const loc = { x: locs[i * 3]!, y: locs[i * 3 + 1]!, z: locs[i * 3 + 2]! };
    const deltas = mode === "aabb" ? encodeAabb(box, loc) : encodeObb(box, loc, mode);
    out.set(deltas, i * 8);
  }
  return out;
}

export function bindDecode(deltas: FlatArray, locs: FlatArray, mode: DeltaMode): Float64Array {
  const n = checkStride(deltas, 8, "deltas");
  if (checkStride(locs, 3, "locs") !== n) {
    throw new RangeError(`deltas (${n}) and locs (${locs.length / 3}) count mismatch`);
  }
  const out = new Float64Array(n * 7);
  for (let i = 0; i < n; i++) {
    const d = Array.from({ length: 8 }, (_, j) => deltas[i * 8 + j]!) as Deltas;
    const loc = { x: locs[i * 3]!, y: locs[i * 3 + 1]!, z: locs[i * 3 + 2]! };
    const box = mode === "aabb" ? decodeAabb(d, loc) : decodeObb(d, loc, mode);
    out.set([box.x, box.y, box.z, box.w, box.l, box.h, box.theta], i * 7);
  }
  return out;
}

export function bindIou(a: FlatArray, b: FlatArray, rotated: boolean): number {
  if (a.length !== 7 || b.length !== 7) {
    throw new RangeError(`expected 7-value boxes, got ${a.length} and ${b.length}`);
  }
  const boxA = boxAt(a, 0);
  const boxB = boxAt(b, 0);
  return rotated ? iouObb(boxA, boxB) : iouAabb(boxA, boxB);
}

export function bindCenterness(faceDistances: FlatArray): number {
  if (faceDistances.length !== 6) {
    throw new RangeError(`expected 6 face distances, got ${faceDistances.length}`);
  }
  return centerness3d(Array.from(faceDistances));
}

/**
 * NMS over a flat detection buffer (9 per row: class, score, then box).
 * Returns the kept row indices in output order.
 */
export function bindNms(dets: FlatArray, iouThreshold: number): number[] {
  const n = checkStride(dets, 9, "dets");
  const parsed: Detection[] = [];
  for (let i = 0; i < n; i++) {
    const o = i * 9;
    parsed.push({
      classLabel: dets[o]!,
      score: dets[o + 1]!,
      box: {
        x: dets[o + 2]!,
        y: dets[o + 3]!,
        z: dets[o + 4]!,
        w: dets[o + 5]!,
        l: dets[o + 6]!,
        h: dets[o + 7]!,
        theta: dets[o + 8]!,
      },
    });
  }
  const kept = nmsRotated(parsed, iouThreshold);
  return kept.map((det) => parsed.indexOf(det));
}

/**
 * Evaluation over flat buffers: detections 10 per row (scene index, class,
 * score, box), ground truth 9 per row (scene index, class, box).
 */
export function bindEval(
  dets: FlatArray,
  gts: FlatArray,
  thresholds: number[],
  rotated: boolean,
): EvalReport {
  const nd = checkStride(dets, 10, "dets");
  const ng = checkStride(gts, 9, "gts");
  const detRecs: DetectionRecord[] = [];
  for (let i = 0; i < nd; i++) {
    const o = i * 10;
    detRecs.push({
      sceneId: String(dets[o]!),
      classLabel: dets[o + 1]!,
      score: dets[o + 2]!,
      box: {
        x: dets[o + 3]!,
        y: dets[o + 4]!,
        z: dets[o + 5]!,
        w: dets[o + 6]!,
        l: dets[o + 7]!,
        h: dets[o + 8]!,
        theta: dets[o + 9]!,
      },
    });
  }
  const gtRecs: GroundTruthRecord[] = [];
  for (let i = 0; i < ng; i++) {
    const o = i * 9;
    gtRecs.push({
      sceneId: String(gts[o]!),
      classLabel: gts[o + 1]!,
      box: {
        x: gts[o + 2]!,
        y: gts[o + 3]!,
        z: gts[o + 4]!,
        w: gts[o + 5]!,
        l: gts[o + 6]!,
        h: gts[o + 7]!,
        theta: gts[o + 8]!,
      },
    });
  }
  return evaluate(detRecs, gtRecs, thresholds, rotated);
}
