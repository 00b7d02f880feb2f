import { gtAnglesFromHandles } from "./drag.js";
import type {
  AngleKey,
  Contour,
  GtHandles,
  Point,
  SessionState,
} from "./types.js";

/** The subset of CanvasRenderingContext2D the renderer touches; tests
 * substitute a recording stub. */
export interface Canvas2D {
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
}

export interface Scene {
  state: SessionState | null;
  contour: Contour | null;
  gtHandles: GtHandles | null;
}

const ENDPLATE_HALF_LENGTH = 22;

function polyline(ctx: Canvas2D, points: Point[]): void {
  ctx.beginPath();
  points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
  ctx.stroke();
}

function dot(ctx: Canvas2D, [x, y]: Point, radius: number): void {
  ctx.beginPath();
  ctx.arc(x, y, radius, 0, 2 * Math.PI);
  ctx.fill();
}

export function drawMaskOutline(ctx: Canvas2D, contour: Contour): void {
  ctx.strokeStyle = "#888";
  ctx.lineWidth = 1;
  ctx.beginPath();
  const outline = [...contour.left, ...[...contour.right].reverse()];
  outline.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
  ctx.closePath();
  ctx.stroke();
}

/** Centerline polyline straight from the server's resampled points; the
 * client never evaluates the curve itself. */
export function drawCenterline(ctx: Canvas2D, state: SessionState): void {
  ctx.strokeStyle = "#d33";
  ctx.lineWidth = 2;
  polyline(ctx, state.centerline);
}

export function drawControlPoints(ctx: Canvas2D, state: SessionState): void {
  ctx.fillStyle = "#36c";
  for (const point of state.curve.control_points) dot(ctx, point, 3);
}

/** Endplate segments at the provenance samples: at sample position the
 * endplate direction is (1, slope) in image coordinates. */
export function drawEndplates(ctx: Canvas2D, state: SessionState): void {
  ctx.strokeStyle = "#2a2";
  ctx.lineWidth = 2;
  const provenance = state.angles.provenance ?? {};
  for (const key of Object.keys(provenance) as AngleKey[]) {
    for (const index of provenance[key] ?? []) {
      const sample = state.slope_samples[index];
      if (!sample) continue;
      const norm = Math.hypot(1, sample.slope) || 1;
      const dx = ENDPLATE_HALF_LENGTH / norm;
      const dy = (ENDPLATE_HALF_LENGTH * sample.slope) / norm;
      ctx.beginPath();
      ctx.moveTo(sample.position[0] - dx, sample.position[1] - dy);
      ctx.lineTo(sample.position[0] + dx, sample.position[1] + dy);
      ctx.stroke();
    }
  }
}

export function drawContourHandles(ctx: Canvas2D, contour: Contour): void {
  ctx.fillStyle = "#fa0";
  for (const side of [contour.left, contour.right]) {
    for (const point of side) dot(ctx, point, 4);
  }
}

export function drawGtHandles(ctx: Canvas2D, handles: GtHandles): void {
  ctx.strokeStyle = "#a3c";
  ctx.fillStyle = "#a3c";
  ctx.lineWidth = 2;
  for (const key of ["mt", "pt", "tl"] as AngleKey[]) {
    for (const segment of handles[key]) {
      polyline(ctx, [segment.a, segment.b]);
      dot(ctx, segment.a, 4);
      dot(ctx, segment.b, 4);
    }
  }
}

export function drawScene(
  ctx: Canvas2D,
  scene: Scene,
  width: number,
  height: number
): void {
  ctx.clearRect(0, 0, width, height);
  if (scene.contour) drawMaskOutline(ctx, scene.contour);
  if (scene.state) {
    drawCenterline(ctx, scene.state);
    drawControlPoints(ctx, scene.state);
    drawEndplates(ctx, scene.state);
  }
  if (scene.contour) drawContourHandles(ctx, scene.contour);
  if (scene.gtHandles) drawGtHandles(ctx, scene.gtHandles);
}

export interface ReadoutModel {
  slope: { mt: string; pt: string; tl: string };
  hybrid: { mt: string; pt: string; tl: string };
  gtLocal: { mt: string; pt: string; tl: string } | null;
  version: number;
  error: string | null;
}

export function readout(
  state: SessionState | null,
  gtHandles: GtHandles | null,
  error: string | null
): ReadoutModel {
  const fmt = (v: number) => v.toFixed(2);
  const triple = (a: { mt: number; pt: number; tl: number }) => ({
    mt: fmt(a.mt),
    pt: fmt(a.pt),
    tl: fmt(a.tl),
  });
  const empty = { mt: "-", pt: "-", tl: "-" };
  return {
    slope: state ? triple(state.slope_angles) : empty,
    hybrid: state ? triple(state.angles) : empty,
    gtLocal: gtHandles ? triple(gtAnglesFromHandles(gtHandles)) : null,
    version: state?.version ?? 0,
    error,
  };
}
