/** Pooled greedy-matching mAP evaluation with all-point AP interpolation. */

import { Box, iouAabb, iouObb } from "./boxes.js";
import { fmtFixed, fmtThreshold } from "./format.js";

export interface GroundTruthRecord {
  sceneId: string;
  classLabel: number;
  box: Box;
}

export interface DetectionRecord {
  sceneId: string;
  classLabel: number;
  score: number;
  box: Box;
}

export interface EvalReport {
  perClassAp: Map<number, Map<number, number>>; // threshold -> class -> AP (NaN when no GT)
  mapAt: Map<number, number>;
  gtCounts: Map<number, number>;
  detCounts: Map<number, number>;
}

function boxIou(a: Box, b: Box, rotated: boolean): number {
  return rotated ? iouObb(a, b) : iouAabb(a, b);
}

export function matchDetections(
  dets: DetectionRecord[],
  gts: GroundTruthRecord[],
  iouThreshold: number,
  rotated = true,
): boolean[] {
  const gtPool = new Map<string, Box[]>();
  for (const gt of gts) {
    const key = `${gt.sceneId}|${gt.classLabel}`;
    const pool = gtPool.get(key);
    if (pool) pool.push(gt.box);
    else gtPool.set(key, [gt.box]);
  }
  const matched = new Map<string, boolean[]>();
  for (const [key, pool] of gtPool) matched.set(key, pool.map(() => false));
  const flags = dets.map(() => false);
  const order = dets.map((_, i) => i).sort((a, b) => dets[b]!.score - dets[a]!.score || a - b);
  for (const i of order) {
    const det = dets[i]!;
    const key = `${det.sceneId}|${det.classLabel}`;
    const candidates = gtPool.get(key) ?? [];
    const used = matched.get(key) ?? [];
    let bestJ = -1;
    let bestIou = 0;
    for (let j = 0; j < candidates.length; j++) {
      if (used[j]) continue;
      const iou = boxIou(det.box, candidates[j]!, rotated);
      if (iou > bestIou) {
        bestIou = iou;
        bestJ = j;
      }
    }
    if (bestJ >= 0 && bestIou >= iouThreshold) {
      used[bestJ] = true;
      flags[i] = true;
    }
  }
  return flags;
}

export function prCurve(
  flags: boolean[],
  scores: number[],
  nGt: number,
): Array<[number, number]> {
  if (flags.length !== scores.length) throw new RangeError("flags and scores must align");
  const order = scores.map((_, i) => i).sort((a, b) => scores[b]! - scores[a]! || a - b);
  const out: Array<[number, number]> = [];
  let tp = 0;
  let fp = 0;
  for (const i of order) {
    if (flags[i]) tp += 1;
    else fp += 1;
    out.push([nGt > 0 ? tp / nGt : 0, tp / (tp + fp)]);
  }
  return out;
}

export function averagePrecision(flags: boolean[], scores: number[], nGt: number): number {
  if (nGt < 0) throw new RangeError("nGt must be >= 0");
  if (nGt === 0) return NaN;
  const curve = prCurve(flags, scores, nGt);
  const mrec = [0, ...curve.map(([r]) => r), 1];
  const mpre = [0, ...curve.map(([, p]) => p), 0];
  for (let i = mpre.length - 2; i >= 0; i--) {
    mpre[i] = Math.max(mpre[i]!, mpre[i + 1]!);
  }
  let ap = 0;
  for (let i = 0; i < mrec.length - 1; i++) {
    ap += (mrec[i + 1]! - mrec[i]!) * mpre[i + 1]!;
  }
  return ap;
}

export function evaluate(
  dets: DetectionRecord[],
  gts: GroundTruthRecord[],
  thresholds: number[] = [0.25, 0.5],
  rotated = true,
): EvalReport {
  const uniq = [...new Set(thresholds)].sort((a, b) => a - b);
  if (uniq.length === 0) throw new RangeError("need at least one IoU threshold");
  const vocab = new Set<number>();
  for (const g of gts) vocab.add(g.classLabel);
  for (const d of dets) vocab.add(d.classLabel);
  const classes = [...vocab].sort((a, b) => a - b);
  const gtCounts = new Map(classes.map((c) => [c, gts.filter((g) => g.classLabel === c).length]));
  const detCounts = new Map(classes.map((c) => [c, dets.filter((d) => d.classLabel === c).length]));
  const perClassAp = new Map<number, Map<number, number>>();
  const mapAt = new Map<number, number>();
  for (const t of uniq) {
    const flags = matchDetections(dets, gts, t, rotated);
    const aps = new Map<number, number>();
    for (const c of classes) {
      const idx = dets.map((_, i) => i).filter((i) => dets[i]!.classLabel === c);
      aps.set(
        c,
        averagePrecision(
          idx.map((i) => flags[i]!),
          idx.map((i) => dets[i]!.score),
          gtCounts.get(c)!,
        ),
      );
    }
    perClassAp.set(t, aps);
    const valid = classes.filter((c) => gtCounts.get(c)! > 0).map((c) => aps.get(c)!);
    mapAt.set(t, valid.length > 0 ? valid.reduce((a, b) => a + b, 0) / valid.length : 0);
  }
  return { perClassAp, mapAt, gtCounts, detCounts };
}

/** Fixed-layout report text, byte-identical to the reference CLI. */
export function formatReport(report: EvalReport): string {
  const thresholds = [...report.mapAt.keys()].sort((a, b) => a - b);
  const classes = [...new Set([...report.gtCounts.keys(), ...report.detCounts.keys()])].sort(
    (a, b) => a - b,
  );
  const lines = [`classes ${classes.length}`];
  for (const c of classes) {
    const parts = [
      `class ${c} gt ${report.gtCounts.get(c) ?? 0} det ${report.detCounts.get(c) ?? 0}`,
    ];
    for (const t of thresholds) {
      const ap = report.perClassAp.get(t)?.get(c) ?? NaN;
      parts.push(`AP@${fmtThreshold(t)} ` + (Number.isNaN(ap) ? "-" : fmtFixed(ap, 4)));
    }
    lines.push(parts.join(" "));
  }
  for (const t of thresholds) {
    lines.push(`mAP@${fmtThreshold(t)} ${fmtFixed(report.mapAt.get(t)!, 4)}`);
  }
  return lines.join("\n") + "\n";
}
