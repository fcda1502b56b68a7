/**
 * Exact fixed-point formatting matching CPython's `%.*f`.
 *
 * `toFixed` rounds exact decimal ties away from zero while CPython rounds
 * them half-to-even, so values like 1/128 would format differently. This
 * implementation decomposes the IEEE-754 double and performs the decimal
 * rounding in exact BigInt arithmetic, giving byte-identical output for any
 * finite double.
 */

const DECOMPOSE = new DataView(new ArrayBuffer(8));

export function fmtFixed(value: number, digits: number): string {
  if (!Number.isFinite(value)) {
    throw new RangeError(`cannot format non-finite value ${value}`);
  }
  if (value === 0) value = 0; // normalize -0 like the reference formatter
  const neg = value < 0 || (value === 0 && Object.is(value, -0));
  DECOMPOSE.setFloat64(0, Math.abs(value));
  const hi = DECOMPOSE.getUint32(0);
  const lo = DECOMPOSE.getUint32(4);
  const expBits = (hi >>> 20) & 0x7ff;
  const mantissa = (BigInt(hi & 0xfffff) << 32n) | BigInt(lo);
  let m: bigint;
  let p: number;
  if (expBits === 0) {
    m = mantissa;
    p = 1 - 1075;
  } else {
    m = mantissa | (1n << 52n);
    p = expBits - 1075;
  }
  const pow10 = 10n ** BigInt(digits);
  let q: bigint;
  if (p >= 0) {
    q = (m * pow10) << BigInt(p);
  } else {
    const shift = BigInt(-p);
    const num = m * pow10;
    q = num >> shift;
    const r = num & ((1n << shift) - 1n);
    const half = 1n << (shift - 1n);
    if (r > half || (r === half && (q & 1n) === 1n)) q += 1n;
  }
  const intPart = (q / pow10).toString();
  const body =
    digits > 0
      ? `${intPart}.${(q % pow10).toString().padStart(digits, "0")}`
      : intPart;
  return neg ? `-${body}` : body;
}

/** Six-decimal record field, with -0 normalized to "0.000000". */
export function fmt6(value: number): string {
  return fmtFixed(value, 6);
}

/** Shortest decimal for IoU thresholds (mirrors `%g` for simple values). */
export function fmtThreshold(t: number): string {
  return String(t);
}
