// Ground-truth handle angles are computed locally with the same slope
// formula the service applies to its curve samples, so the readout and
// the server-side analysis always agree.

import type { Point, Segment } from "./types.js";

/** Acute angle in degrees between lines of slope s1 and s2; 90 when the
 * denominator 1 + s1*s2 vanishes. */
export function angleBetweenSlopes(s1: number, s2: number): number {
  const den = 1 + s1 * s2;
  if (den === 0) return 90;
  return Math.abs(Math.atan((s1 - s2) / den)) * (180 / Math.PI);
}

export function segmentSlope(segment: Segment): number {
  const dx = segment.b[0] - segment.a[0];
  const dy = segment.b[1] - segment.a[1];
  if (dx === 0 && dy === 0) {
    throw new Error("zero-length segment");
  }
  return dy / dx; // +-Infinity for vertical segments
}

function directionAngleDeg(segment: Segment): number {
  const dx = segment.b[0] - segment.a[0];
  const dy = segment.b[1] - segment.a[1];
  return (Math.atan2(dy, dx) * 180) / Math.PI;
}

/** Acute angle between two endplate segments. Uses the slope formula when
 * both slopes are finite; vertical segments fall back to the equivalent
 * direction-angle form (the limit of the slope formula). */
export function angleBetweenSegments(a: Segment, b: Segment): number {
  const s1 = segmentSlope(a);
  const s2 = segmentSlope(b);
  if (Number.isFinite(s1) && Number.isFinite(s2)) {
    return angleBetweenSlopes(s1, s2);
  }
  const diff = Math.abs(directionAngleDeg(a) - directionAngleDeg(b)) % 180;
  return Math.min(diff, 180 - diff);
}

export function midpoint(segment: Segment): Point {
  return [
    (segment.a[0] + segment.b[0]) / 2,
    (segment.a[1] + segment.b[1]) / 2,
  ];
}
