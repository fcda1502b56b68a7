/**
 * Box geometry: rotated and axis-aligned IoU plus 3D centerness.
 *
 * Mirrors the reference implementation operation for operation (same clip
 * ordering, same tolerances) so results agree to the last bit wherever the
 * underlying math library does.
 */

export interface Box {
  x: number;
  y: number;
  z: number;
  w: number;
  l: number;
  h: number;
  theta: number;
}

const MERGE_EPS_SQ = 1e-12;
const INSIDE_REL_EPS = 1e-12;

export function checkExtents(w: number, l: number, h: number): void {
  if (!(w > 0 && l > 0 && h > 0)) {
    throw new RangeError(`box extents must be positive, got w=${w}, l=${l}, h=${h}`);
  }
}

export function volume(box: Box): number {
  return box.w * box.l * box.h;
}

export function iouAabb(a: Box, b: Box): number {
  const ix = Math.min(a.x + a.w / 2, b.x + b.w / 2) - Math.max(a.x - a.w / 2, b.x - b.w / 2);
  const iy = Math.min(a.y + a.l / 2, b.y + b.l / 2) - Math.max(a.y - a.l / 2, b.y - b.l / 2);
  const iz = Math.min(a.z + a.h / 2, b.z + b.h / 2) - Math.max(a.z - a.h / 2, b.z - b.h / 2);
  if (ix <= 0 || iy <= 0 || iz <= 0) return 0;
  const inter = ix * iy * iz;
  const union = volume(a) + volume(b) - inter;
  return Math.min(Math.max(inter / union, 0), 1);
}

type Pt = [number, number];

export function footprintCorners(box: Box): Pt[] {
  const c = Math.cos(box.theta);
  const s = Math.sin(box.theta);
  const hw = box.w / 2;
  const hl = box.l / 2;
  const local: Pt[] = [
    [hw, hl],
    [-hw, hl],
    [-hw, -hl],
    [hw, -hl],
  ];
  return local.map(([dx, dy]) => [box.x + c * dx - s * dy, box.y + s * dx + c * dy]);
}

function clipConvex(subject: Pt[], clip: Pt[]): Pt[] {
  let output = subject.slice();
  const n = clip.length;
  for (let i = 0; i < n; i++) {
    if (output.length === 0) return [];
    const [ax, ay] = clip[i]!;
    const [bx, by] = clip[(i + 1) % n]!;
    const ex = bx - ax;
    const ey = by - ay;
    const scale = Math.abs(ex) + Math.abs(ey);
    const inside = (px: number, py: number): boolean => {
      const cross = ex * (py - ay) - ey * (px - ax);
      return cross >= -INSIDE_REL_EPS * scale * (scale + Math.abs(px - ax) + Math.abs(py - ay));
    };
    const points = output;
    output = [];
    let [px, py] = points[points.length - 1]!;
    let prevIn = inside(px, py);
    for (const [cx, cy] of points) {
      const curIn = inside(cx, cy);
      if (curIn !== prevIn) {
        const sx = cx - px;
        const sy = cy - py;
        const denom = ex * sy - ey * sx;
        if (denom !== 0) {
          const t = ((ax - px) * ey - (ay - py) * ex) / -denom;
          output.push([px + t * sx, py + t * sy]);
        }
      }
      if (curIn) output.push([cx, cy]);
      px = cx;
      py = cy;
      prevIn = curIn;
    }
  }
  return mergeClose(output);
}

function mergeClose(poly: Pt[]): Pt[] {
  if (poly.length < 2) return poly;
  const out: Pt[] = [];
  for (const p of poly) {
    if (out.length > 0) {
      const last = out[out.length - 1]!;
      const dx = p[0] - last[0];
      const dy = p[1] - last[1];
      if (dx * dx + dy * dy < MERGE_EPS_SQ) continue;
    }
    out.push(p);
  }
  if (out.length > 1) {
    const dx = out[0]![0] - out[out.length - 1]![0];
    const dy = out[0]![1] - out[out.length - 1]![1];
    if (dx * dx + dy * dy < MERGE_EPS_SQ) out.pop();
  }
  return out;
}

function polygonArea(poly: Pt[]): number {
  if (poly.length < 3) return 0;
  let acc = 0;
  const n = poly.length;
  for (let i = 0; i < n; i++) {
    const [x0, y0] = poly[i]!;
    const [x1, y1] = poly[(i + 1) % n]!;
    acc += x0 * y1 - x1 * y0;
  }
  return Math.abs(acc) / 2;
}

export function iouObb(a: Box, b: Box): number {
  const dz =
    Math.min(a.z + a.h / 2, b.z + b.h / 2) - Math.max(a.z - a.h / 2, b.z - b.h / 2);
  if (dz <= 0) return 0;
  const dx = a.x - b.x;
  const dy = a.y - b.y;
  const ra = Math.hypot(a.w, a.l) / 2;
  const rb = Math.hypot(b.w, b.l) / 2;
  if (dx * dx + dy * dy > (ra + rb) * (ra + rb)) return 0;
  const area = polygonArea(clipConvex(footprintCorners(a), footprintCorners(b)));
  if (area <= 0) return 0;
  const inter = area * dz;
  const union = volume(a) + volume(b) - inter;
  return Math.min(Math.max(inter / union, 0), 1);
}

/** Geometric-mean centerness from six nonnegative face distances. */
export function centerness3d(d: readonly number[]): number {
  if (d.length < 6) throw new RangeError(`expected 6 face distances, got ${d.length}`);
  let prod = 1;
  for (let axis = 0; axis < 3; axis++) {
    const lo = d[2 * axis]!;
    const hi = d[2 * axis + 1]!;
    if (lo < 0 || hi < 0) {
      throw new RangeError(`negative face distance ${Math.min(lo, hi)}: location outside box`);
    }
    const big = Math.max(lo, hi);
    if (big === 0) return 0;
    prod *= Math.min(lo, hi) / big;
  }
  return Math.pow(prod, 1 / 3);
}
