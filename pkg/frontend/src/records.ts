/** Parsing and formatting of the whitespace-separated record formats. */

import { Box } from "./boxes.js";
import { fmt6 } from "./format.js";
import { Deltas, Location } from "./parametrize.js";
import { DetectionRecord, GroundTruthRecord } from "./evaluate.js";

export interface BoxRecord {
  sceneId: string;
  classLabel: number;
  box: Box;
  /** Optional per-record encoding location (12-column form). */
  location?: Location;
}

export interface DeltaRecord {
  sceneId: string;
  classLabel: number;
  location: Location;
  deltas: Deltas;
  score?: number;
  level?: number;
  boxId?: number;
}

export function dataLines(text: string): string[][] {
  const out: string[][] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (line === "" || line.startsWith("#")) continue;
    out.push(line.split(/\s+/));
  }
  return out;
}

function nums(parts: string[], from: number): number[] {
  return parts.slice(from).map((p) => {
    const v = Number(p);
    if (Number.isNaN(v)) throw new RangeError(`malformed number ${p}`);
    return v;
  });
}

export function parseBoxRecords(text: string): BoxRecord[] {
  return dataLines(text).map((parts) => {
    if (parts.length !== 9 && parts.length !== 12) {
      throw new RangeError(`expected 9 or 12 fields, got ${parts.length}`);
    }
    const v = nums(parts, 2);
    const rec: BoxRecord = {
      sceneId: parts[0]!,
      classLabel: Number(parts[1]),
      box: { x: v[0]!, y: v[1]!, z: v[2]!, w: v[3]!, l: v[4]!, h: v[5]!, theta: v[6]! },
    };
    if (v.length === 10) rec.location = { x: v[7]!, y: v[8]!, z: v[9]! };
    return rec;
  });
}

export function parseDeltaRecords(text: string): DeltaRecord[] {
  return dataLines(text).map((parts) => {
    if (parts.length !== 13 && parts.length !== 14 && parts.length !== 16) {
      throw new RangeError(`expected 13, 14 or 16 fields, got ${parts.length}`);
    }
    const v = nums(parts, 2);
    const rec: DeltaRecord = {
      sceneId: parts[0]!,
      classLabel: Number(parts[1]),
      location: { x: v[0]!, y: v[1]!, z: v[2]! },
      deltas: [v[3]!, v[4]!, v[5]!, v[6]!, v[7]!, v[8]!, v[9]!, v[10]!],
    };
    if (v.length >= 12) rec.score = v[11]!;
    if (v.length === 14) {
      rec.level = v[12]!;
      rec.boxId = v[13]!;
    }
    return rec;
  });
}

export function parseDetectionRecords(text: string): DetectionRecord[] {
  return dataLines(text).map((parts) => {
    if (parts.length !== 10) throw new RangeError(`expected 10 fields, got ${parts.length}`);
    const v = nums(parts, 2);
    return {
      sceneId: parts[0]!,
      classLabel: Number(parts[1]),
      score: v[0]!,
      box: { x: v[1]!, y: v[2]!, z: v[3]!, w: v[4]!, l: v[5]!, h: v[6]!, theta: v[7]! },
    };
  });
}

export function parseGroundTruthRecords(text: string): GroundTruthRecord[] {
  return dataLines(text).map((parts) => {
    if (parts.length !== 9) throw new RangeError(`expected 9 fields, got ${parts.length}`);
    const v = nums(parts, 2);
    return {
      sceneId: parts[0]!,
      classLabel: Number(parts[1]),
      box: { x: v[0]!, y: v[1]!, z: v[2]!, w: v[3]!, l: v[4]!, h: v[5]!, theta: v[6]! },
    };
  });
}

/** Point cloud "x y z r g b" text into a flat xyz array (colors dropped). */
export function parsePointCloudXyz(text: string): number[] {
  const xyz: number[] = [];
  for (const parts of dataLines(text)) {
    if (parts.length !== 6) throw new RangeError(`expected 6 fields, got ${parts.length}`);
    const v = nums(parts, 0);
    xyz.push(v[0]!, v[1]!, v[2]!);
  }
  return xyz;
}

export function formatDeltaRecord(rec: DeltaRecord): string {
  const fields = [rec.location.x, rec.location.y, rec.location.z, ...rec.deltas];
  let line = `${rec.sceneId} ${rec.classLabel} ${fields.map(fmt6).join(" ")}`;
  if (rec.score !== undefined) line += ` ${fmt6(rec.score)}`;
  if (rec.level !== undefined && rec.boxId !== undefined) line += ` ${rec.level} ${rec.boxId}`;
  return line;
}

export function formatBoxRecord(rec: BoxRecord): string {
  const b = rec.box;
  const fields = [b.x, b.y, b.z, b.w, b.l, b.h, b.theta];
  return `${rec.sceneId} ${rec.classLabel} ${fields.map(fmt6).join(" ")}`;
}

export function formatDetectionRecord(rec: DetectionRecord): string {
  const b = rec.box;
  const fields = [rec.score, b.x, b.y, b.z, b.w, b.l, b.h, b.theta];
  return `${rec.sceneId} ${rec.classLabel} ${fields.map(fmt6).join(" ")}`;
}
