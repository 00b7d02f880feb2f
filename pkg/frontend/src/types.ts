export type Point = [number, number];

export interface Contour {
  left: Point[];
  right: Point[];
}

export interface Curve {
  degree: number;
  control_points: Point[];
  knots: number[];
}

export type AngleKey = "mt" | "pt" | "tl";

export type Provenance = Partial<Record<AngleKey, [number, number]>>;

export interface Angles {
  mt: number;
  pt: number;
  tl: number;
  provenance?: Provenance;
}

export interface GtTriple {
  mt: number;
  pt: number;
  tl: number;
}

export interface SlopeSample {
  index: number;
  u: number;
  position: Point;
  slope: number;
}

export interface SessionState {
  session_id: string;
  version: number;
  width: number;
  height: number;
  annotation: Contour;
  curve: Curve;
  centerline: Point[];
  slope_samples: SlopeSample[];
  slope_angles: Angles;
  angles: Angles;
  gt_angles: GtTriple | null;
}

export interface ExportBundle extends SessionState {
  mask_base64: string;
}

export interface Segment {
  a: Point;
  b: Point;
}

/** Two endplate segments per angle, draggable by their endpoints. */
export type GtHandles = Record<AngleKey, [Segment, Segment]>;

export function cloneContour(contour: Contour): Contour {
  return {
    left: contour.left.map((p) => [p[0], p[1]] as Point),
    right: contour.right.map((p) => [p[0], p[1]] as Point),
  };
}

export function contoursEqual(a: Contour, b: Contour): boolean {
  const flat = (c: Contour) => [...c.left, ...c.right];
  const fa = flat(a);
  const fb = flat(b);
  if (fa.length !== fb.length) return false;
  return fa.every((p, i) => p[0] === fb[i][0] && p[1] === fb[i][1]);
}
