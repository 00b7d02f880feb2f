import { angleBetweenSegments } from "./angle.js";
import { SessionStore } from "./store.js";
import {
  cloneContour,
  type AngleKey,
  type Contour,
  type GtHandles,
  type GtTriple,
  type Point,
  type Segment,
} from "./types.js";

export const HANDLE_RADIUS = 7;

export type HandleRef =
  | { kind: "contour"; side: "left" | "right"; index: number }
  | { kind: "gt"; angle: AngleKey; segment: 0 | 1; end: "a" | "b" };

function near(p: Point, x: number, y: number, radius: number): boolean {
  const dx = p[0] - x;
  const dy = p[1] - y;
  return dx * dx + dy * dy <= radius * radius;
}

export function hitTest(
  contour: Contour | null,
  gtHandles: GtHandles | null,
  x: number,
  y: number,
  radius: number = HANDLE_RADIUS
): HandleRef | null {
  if (gtHandles) {
    for (const angle of ["mt", "pt", "tl"] as AngleKey[]) {
      for (const segmentIndex of [0, 1] as const) {
        const segment = gtHandles[angle][segmentIndex];
        for (const end of ["a", "b"] as const) {
          if (near(segment[end], x, y, radius)) {
            return { kind: "gt", angle, segment: segmentIndex, end };
          }
        }
      }
    }
  }
  if (contour) {
    for (const side of ["left", "right"] as const) {
      for (let index = 0; index < contour[side].length; index++) {
        if (near(contour[side][index], x, y, radius)) {
          return { kind: "contour", side, index };
        }
      }
    }
  }
  return null;
}

export function defaultGtHandles(width: number, height: number): GtHandles {
  const make = (y: number): [Segment, Segment] => [
    { a: [width * 0.25, y], b: [width * 0.45, y] },
    { a: [width * 0.55, y], b: [width * 0.75, y] },
  ];
  return {
    pt: make(height * 0.2),
    mt: make(height * 0.5),
    tl: make(height * 0.8),
  };
}

export function gtAnglesFromHandles(handles: GtHandles): GtTriple {
  return {
    mt: angleBetweenSegments(handles.mt[0], handles.mt[1]),
    pt: angleBetweenSegments(handles.pt[0], handles.pt[1]),
    tl: angleBetweenSegments(handles.tl[0], handles.tl[1]),
  };
}

/** Pointer-driven editing of contour handles and GT endplate handles.
 * Contour moves go through the store's debounced commit; GT handle
 * moves recompute the triple locally and commit on release. */
export class DragController {
  active: HandleRef | null = null;
  gtHandles: GtHandles;

  constructor(
    private readonly store: SessionStore,
    width: number,
    height: number
  ) {
    this.width = width;
    this.height = height;
    this.gtHandles = defaultGtHandles(width, height);
  }

  private width: number;
  private height: number;

  private clamp(x: number, y: number): Point {
    return [
      Math.min(Math.max(x, 0), this.width - 1),
      Math.min(Math.max(y, 0), this.height - 1),
    ];
  }

  pointerDown(x: number, y: number): boolean {
    this.active = hitTest(this.store.contour, this.gtHandles, x, y);
    return this.active !== null;
  }

  pointerMove(x: number, y: number): void {
    if (!this.active) return;
    const position = this.clamp(x, y);
    if (this.active.kind === "contour") {
      const contour = this.store.contour;
      if (!contour) return;
      const draft = cloneContour(contour);
      draft[this.active.side][this.active.index] = position;
      this.store.setContour(draft);
    } else {
      const segment = this.gtHandles[this.active.angle][this.active.segment];
      segment[this.active.end] = position;
    }
  }

  pointerUp(): void {
    if (this.active?.kind === "gt") {
      try {
        void this.store.setGtAngles(gtAnglesFromHandles(this.gtHandles));
      } catch {
        // zero-length segment: leave the previous GT triple in place
      }
    }
    this.active = null;
  }
}
