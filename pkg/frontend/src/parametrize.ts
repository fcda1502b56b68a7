/** Box <-> regression-delta codecs for the four heading parametrizations. */

import { Box, checkExtents } from "./boxes.js";

export type DeltaMode = "aabb" | "naive" | "sincos" | "mobius";

export interface Location {
  x: number;
  y: number;
  z: number;
}

/** d1..d6 face distances plus two angle channels, as in the wire format. */
export type Deltas = [number, number, number, number, number, number, number, number];

/** IEEE-754 remainder (round-to-nearest quotient, ties to even). */
export function ieeeRemainder(x: number, y: number): number {
  const q = x / y;
  let n = Math.round(q);
  // Math.round breaks .5 ties toward +Infinity; IEEE wants nearest even.
  if (Math.abs(q - n) === 0.5) n = 2 * Math.round(q / 2);
  return x - n * y;
}

export function canonicalizeObb(box: Box): Box {
  let { w, l, theta } = box;
  if (l > w) {
    const t = w;
    w = l;
    l = t;
    theta += Math.PI / 2;
  }
  if (w === l) {
    const half = Math.PI / 2;
    theta = ieeeRemainder(theta, half);
    if (theta <= -half / 2) theta += half;
  } else {
    theta = ieeeRemainder(theta, Math.PI);
    if (theta <= -Math.PI / 2) theta += Math.PI;
  }
  return { x: box.x, y: box.y, z: box.z, w, l, h: box.h, theta };
}

function faceDistancesLocal(
  w: number,
  l: number,
  h: number,
  ox: number,
  oy: number,
  oz: number,
): [number, number, number, number, number, number] {
  const d1 = w / 2 - ox;
  const d2 = ox + w / 2;
  const d3 = l / 2 - oy;
  const d4 = oy + l / 2;
  const d5 = h / 2 - oz;
  const d6 = oz + h / 2;
  if (Math.min(d1, d2, d3, d4, d5, d6) < 0) {
    throw new RangeError("location lies outside the box");
  }
  return [d1, d2, d3, d4, d5, d6];
}

export function encodeAabb(box: Box, loc: Location): Deltas {
  const d = faceDistancesLocal(
    box.w,
    box.l,
    box.h,
    loc.x - box.x,
    loc.y - box.y,
    loc.z - box.z,
  );
  return [...d, 0, 0];
}

export function decodeAabb(deltas: Deltas, loc: Location): Box {
  const [d1, d2, d3, d4, d5, d6] = deltas;
  if (Math.min(d1, d2, d3, d4, d5, d6) < 0) {
    throw new RangeError("face distances must be nonnegative");
  }
  const w = d1 + d2;
  const l = d3 + d4;
  const h = d5 + d6;
  if (!(w > 0 && l > 0 && h > 0)) {
    throw new RangeError("degenerate extents decoded from deltas");
  }
  return {
    x: loc.x + (d1 - d2) / 2,
    y: loc.y + (d3 - d4) / 2,
    z: loc.z + (d5 - d6) / 2,
    w,
    l,
    h,
    theta: 0,
  };
}

export function encodeObb(box: Box, loc: Location, mode: DeltaMode): Deltas {
  if (mode === "aabb") throw new RangeError("use encodeAabb for axis-aligned boxes");
  if (mode === "mobius") box = canonicalizeObb(box);
  const c = Math.cos(box.theta);
  const s = Math.sin(box.theta);
  const rx = loc.x - box.x;
  const ry = loc.y - box.y;
  const ox = c * rx + s * ry;
  const oy = -s * rx + c * ry;
  const d = faceDistancesLocal(box.w, box.l, box.h, ox, oy, loc.z - box.z);
  let d7: number;
  let d8: number;
  if (mode === "naive") {
    d7 = box.theta;
    d8 = 0;
  } else if (mode === "sincos") {
    d7 = Math.sin(box.theta);
    d8 = Math.cos(box.theta);
  } else {
    const lr = Math.log(box.w / box.l);
    d7 = lr * Math.sin(2 * box.theta);
    d8 = lr * Math.cos(2 * box.theta);
  }
  return [...d, d7, d8];
}

export function decodeObb(deltas: Deltas, loc: Location, mode: DeltaMode): Box {
  if (mode === "aabb") throw new RangeError("use decodeAabb for axis-aligned deltas");
  const [d1, d2, d3, d4, d5, d6, d7, d8] = deltas;
  if (Math.min(d1, d2, d3, d4, d5, d6) < 0) {
    throw new RangeError("face distances must be nonnegative");
  }
  const h = d5 + d6;
  let w: number;
  let l: number;
  let theta: number;
  if (mode === "mobius") {
    const s = d1 + d2 + d3 + d4;
    if (!(s > 0 && h > 0)) throw new RangeError("degenerate extents decoded from deltas");
    const q = Math.exp(Math.sqrt(d7 * d7 + d8 * d8));
    w = (s * q) / (1 + q);
    l = s / (1 + q);
    theta = 0.5 * Math.atan2(d7, d8);
  } else {
    w = d1 + d2;
    l = d3 + d4;
    if (!(w > 0 && l > 0 && h > 0)) {
      throw new RangeError("degenerate extents decoded from deltas");
    }
    if (mode === "naive") {
      theta = d7;
    } else {
      if (d7 === 0 && d8 === 0) throw new RangeError("sincos deltas need a nonzero (d7, d8)");
      theta = Math.atan2(d7, d8);
    }
  }
  const vx = (d1 - d2) / 2;
  const vy = (d3 - d4) / 2;
  const c = Math.cos(theta);
  const sn = Math.sin(theta);
  checkExtents(w, l, h);
  return {
    x: loc.x + c * vx - sn * vy,
    y: loc.y + sn * vx + c * vy,
    z: loc.z + (d5 - d6) / 2,
    w,
    l,
    h,
    theta,
  };
}
