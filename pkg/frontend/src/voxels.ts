/** Sparse voxel sets: voxelization, level striding and score pruning. */

import { Location } from "./parametrize.js";

export type Voxel = [number, number, number];

export interface VoxelSet {
  voxelSize: number;
  /** Unique voxels in lexicographic order. */
  voxels: Voxel[];
  level: number | null;
  scores?: Map<string, number>;
}

export function voxelKey(v: Voxel): string {
  return `${v[0]},${v[1]},${v[2]}`;
}

export function compareVoxels(a: Voxel, b: Voxel): number {
  return a[0] - b[0] || a[1] - b[1] || a[2] - b[2];
}

/** Bin xyz points (flat [x0,y0,z0,x1,...] layout) into unique voxels. */
export function voxelize(xyz: readonly number[], voxelSize: number): VoxelSet {
  if (!(voxelSize > 0)) throw new RangeError("voxelSize must be positive");
  if (xyz.length === 0 || xyz.length % 3 !== 0) {
    throw new RangeError(`xyz length must be a positive multiple of 3, got ${xyz.length}`);
  }
  const seen = new Map<string, Voxel>();
  for (let i = 0; i < xyz.length; i += 3) {
    const v: Voxel = [
      Math.floor(xyz[i]! / voxelSize),
      Math.floor(xyz[i + 1]! / voxelSize),
      Math.floor(xyz[i + 2]! / voxelSize),
    ];
    seen.set(voxelKey(v), v);
  }
  const voxels = [...seen.values()].sort(compareVoxels);
  return { voxelSize, voxels, level: null };
}

export function strideExponent(firstStride: number): number {
  if (firstStride !== 1 && firstStride !== 2) {
    throw new RangeError("firstStride must be 1 or 2");
  }
  return firstStride === 1 ? 2 : 3;
}

export function levelVoxelSize(
  baseVoxelSize: number,
  level: number,
  firstStride: number,
): number {
  return baseVoxelSize * 2 ** (level + strideExponent(firstStride));
}

/** Downsample by arithmetic right shift (floor semantics for negatives). */
export function levelLocations(
  set: VoxelSet,
  baseVoxelSize: number,
  firstStride: number,
  level: number,
): VoxelSet {
  const shift = set.level === null ? strideExponent(firstStride) + level : level - set.level;
  if (shift < 0) throw new RangeError("cannot upsample a voxel set");
  const seen = new Map<string, Voxel>();
  for (const [x, y, z] of set.voxels) {
    const v: Voxel = [x >> shift, y >> shift, z >> shift];
    seen.set(voxelKey(v), v);
  }
  return {
    voxelSize: levelVoxelSize(baseVoxelSize, level, firstStride),
    voxels: [...seen.values()].sort(compareVoxels),
    level,
  };
}

export function worldLocation(set: VoxelSet, v: Voxel): Location {
  return {
    x: (v[0] + 0.5) * set.voxelSize,
    y: (v[1] + 0.5) * set.voxelSize,
    z: (v[2] + 0.5) * set.voxelSize,
  };
}

/** Keep the nVox highest-scored voxels; ties by lexicographic coordinate. */
export function pruneTopk(set: VoxelSet, nVox: number): VoxelSet {
  if (nVox <= 0) throw new RangeError("nVox must be positive");
  if (!set.scores) throw new RangeError("pruneTopk needs a scored voxel set");
  if (set.voxels.length <= nVox) return set;
  const scores = set.scores;
  const ranked = set.voxels
    .slice()
    .sort((a, b) => scores.get(voxelKey(b))! - scores.get(voxelKey(a))! || compareVoxels(a, b));
  const kept = ranked.slice(0, nVox).sort(compareVoxels);
  const keptScores = new Map(kept.map((v) => [voxelKey(v), scores.get(voxelKey(v))!]));
  return { voxelSize: set.voxelSize, voxels: kept, level: set.level, scores: keptScores };
}
