/** Multi-level anchor-free target assignment (see reference semantics). */

import { Box, centerness3d, volume } from "./boxes.js";
import {
  Deltas,
  DeltaMode,
  Location,
  encodeAabb,
  encodeObb,
} from "./parametrize.js";
import { Voxel, VoxelSet, compareVoxels, voxelKey, worldLocation } from "./voxels.js";

export interface AssignmentConfig {
  nLoc: number;
  centerSampleK: number;
}

export interface AssignmentTarget {
  location: Location;
  level: number;
  voxel: Voxel;
  classLabel: number;
  centerness: number;
  deltas: Deltas;
  boxId: number;
}

function insideFootprint(box: Box, loc: Location): boolean {
  const dz = loc.z - box.z;
  if (!(-box.h / 2 < dz && dz < box.h / 2)) return false;
  const c = Math.cos(box.theta);
  const s = Math.sin(box.theta);
  const rx = loc.x - box.x;
  const ry = loc.y - box.y;
  const ox = c * rx + s * ry;
  const oy = -s * rx + c * ry;
  return -box.w / 2 < ox && ox < box.w / 2 && -box.l / 2 < oy && oy < box.l / 2;
}

function covered(box: Box, levelLocs: VoxelSet): Array<[Voxel, Location]> {
  const out: Array<[Voxel, Location]> = [];
  for (const voxel of levelLocs.voxels) {
    const loc = worldLocation(levelLocs, voxel);
    if (insideFootprint(box, loc)) out.push([voxel, loc]);
  }
  return out;
}

export function selectLevel(box: Box, allLevels: VoxelSet[], cfg: AssignmentConfig): number {
  if (allLevels.length === 0) throw new RangeError("need at least one feature level");
  let chosen = 0;
  for (let i = 0; i < allLevels.length; i++) {
    if (covered(box, allLevels[i]!).length >= cfg.nLoc) chosen = i;
  }
  return chosen;
}

export function assign(
  boxes: Box[],
  classLabels: number[],
  allLevels: VoxelSet[],
  cfg: AssignmentConfig,
  mode: DeltaMode,
): AssignmentTarget[] {
  if (boxes.length !== classLabels.length) {
    throw new RangeError("boxes and classLabels must have equal length");
  }
  if (classLabels.some((label) => label === 0)) {
    throw new RangeError("class label 0 is reserved for background");
  }
  if (allLevels.length === 0) throw new RangeError("need at least one feature level");

  const claims = new Map<string, { level: number; voxel: Voxel; loc: Location; boxIds: number[] }>();
  for (let bi = 0; bi < boxes.length; bi++) {
    const box = boxes[bi]!;
    const lvl = selectLevel(box, allLevels, cfg);
    const cov = covered(box, allLevels[lvl]!);
    const withDist = cov.map(([voxel, loc]) => ({
      voxel,
      loc,
      dist: Math.sqrt(
        (loc.x - box.x) ** 2 + (loc.y - box.y) ** 2 + (loc.z - box.z) ** 2,
      ),
    }));
    withDist.sort((a, b) => a.dist - b.dist || compareVoxels(a.voxel, b.voxel));
    for (const { voxel, loc } of withDist.slice(0, cfg.centerSampleK)) {
      const key = `${lvl}|${voxelKey(voxel)}`;
      const entry = claims.get(key);
      if (entry) entry.boxIds.push(bi);
      else claims.set(key, { level: lvl, voxel, loc, boxIds: [bi] });
    }
  }

  const targets: AssignmentTarget[] = [];
  for (const { level, voxel, loc, boxIds } of claims.values()) {
    let bi = boxIds[0]!;
    for (const cand of boxIds) {
      if (volume(boxes[cand]!) < volume(boxes[bi]!) || (volume(boxes[cand]!) === volume(boxes[bi]!) && cand < bi)) {
        bi = cand;
      }
    }
    const box = boxes[bi]!;
    let deltas: Deltas;
    if (mode === "aabb") {
      if (box.theta !== 0) throw new RangeError("AABB assignment requires theta == 0 boxes");
      deltas = encodeAabb(box, loc);
    } else {
      deltas = encodeObb(box, loc, mode);
    }
    targets.push({
      location: loc,
      level,
      voxel,
      classLabel: classLabels[bi]!,
      centerness: centerness3d(deltas),
      deltas,
      boxId: bi,
    });
  }
  targets.sort((a, b) => a.level - b.level || compareVoxels(a.voxel, b.voxel));
  return targets;
}
