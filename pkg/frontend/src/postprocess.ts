/** Score shaping and greedy per-class rotated NMS. */

import { Box, iouObb } from "./boxes.js";

export interface Detection {
  classLabel: number;
  score: number;
  box: Box;
}

export function applyCenterness(classProbs: readonly number[], centerness: number): number[] {
  if (!(centerness >= 0 && centerness <= 1)) {
    throw new RangeError("centerness must be in [0, 1]");
  }
  if (classProbs.some((p) => !(p >= 0 && p <= 1))) {
    throw new RangeError("class probabilities must be in [0, 1]");
  }
  return classProbs.map((p) => p * centerness);
}

export function nmsRotated(dets: Detection[], iouThreshold: number): Detection[] {
  if (!(iouThreshold > 0 && iouThreshold <= 1)) {
    throw new RangeError("iouThreshold must be in (0, 1]");
  }
  const byClass = new Map<number, Array<[number, Detection]>>();
  dets.forEach((det, idx) => {
    const group = byClass.get(det.classLabel);
    if (group) group.push([idx, det]);
    else byClass.set(det.classLabel, [[idx, det]]);
  });
  const kept: Array<[number, Detection]> = [];
  for (const group of byClass.values()) {
    group.sort((a, b) => b[1].score - a[1].score || a[0] - b[0]);
    const keptBoxes: Box[] = [];
    for (const [idx, det] of group) {
      if (keptBoxes.some((kb) => iouObb(det.box, kb) >= iouThreshold)) continue;
      keptBoxes.push(det.box);
      kept.push([idx, det]);
    }
  }
  kept.sort((a, b) => b[1].score - a[1].score || a[0] - b[0]);
  return kept.map(([, det]) => det);
}
