// Deterministic in-memory stand-in for the annotation service, mounted
// behind a fetch-compatible function so tests exercise the real ApiClient
// and can intercept every request on the wire.

import type { FetchLike, HttpResponse } from "../src/api.js";
import type {
  Angles,
  Contour,
  Curve,
  ExportBundle,
  Point,
  SessionState,
  SlopeSample,
} from "../src/types.js";

export interface TrafficEntry {
  method: string;
  url: string;
  body: unknown;
  responseBody: unknown;
  status: number;
}

function midline(contour: Contour): Point[] {
  return contour.left.map((p, i) => [
    (p[0] + contour.right[i][0]) / 2,
    (p[1] + contour.right[i][1]) / 2,
  ]);
}

/** Pure fake of the server recompute: any deterministic function of the
 * contour works for the client tests, which only rely on determinism and
 * on responses being the single source of rendered geometry. */
export function fakeAnalysis(contour: Contour): {
  curve: Curve;
  centerline: Point[];
  slope_samples: SlopeSample[];
  slope_angles: Angles;
  angles: Angles;
} {
  const mid = midline(contour);
  const curve: Curve = {
    degree: 3,
    control_points: mid.slice(0, 10),
    knots: [0, 0, 0, 0, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95, 1, 1, 1, 1],
  };
  const centerline: Point[] = [];
  for (let i = 0; i < 34; i++) {
    const t = (i * (mid.length - 1)) / 33;
    const lo = Math.floor(t);
    const hi = Math.min(lo + 1, mid.length - 1);
    const w = t - lo;
    centerline.push([
      mid[lo][0] * (1 - w) + mid[hi][0] * w,
      mid[lo][1] * (1 - w) + mid[hi][1] * w,
    ]);
  }
  const slope_samples: SlopeSample[] = mid.map((position, index) => {
    const next = mid[Math.min(index + 1, mid.length - 1)];
    const prev = mid[Math.max(index - 1, 0)];
    const dy = next[1] - prev[1] || 1;
    return {
      index,
      u: index / (mid.length - 1),
      position,
      slope: -(next[0] - prev[0]) / dy + 0, // normalize -0 for JSON fidelity
    };
  });
  const slopes = slope_samples.map((s) => s.slope);
  const spread = Math.max(...slopes) - Math.min(...slopes);
  const mt = Math.min(179, Math.abs(Math.atan(spread) * (180 / Math.PI)));
  const angles: Angles = {
    mt,
    pt: mt / 2,
    tl: mt / 3,
    provenance: {
      mt: [slopes.indexOf(Math.max(...slopes)), slopes.indexOf(Math.min(...slopes))].sort(
        (a, b) => a - b
      ) as [number, number],
    },
  };
  if (angles.provenance!.mt![0] === angles.provenance!.mt![1]) {
    delete angles.provenance;
  }
  return { curve, centerline, slope_samples, slope_angles: angles, angles };
}

export class MockService {
  sessions = new Map<string, SessionState>();
  traffic: TrafficEntry[] = [];
  failNextPutWith: { status: number; error: string; detail: string } | null =
    null;
  private counter = 0;

  readonly fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body) : undefined;
    const { status, payload } = this.route(method, url, body);
    this.traffic.push({
      method,
      url,
      body,
      responseBody: JSON.parse(JSON.stringify(payload)), // as sent on the wire
      status,
    });
    const response: HttpResponse = {
      ok: status < 400,
      status,
      json: async () => JSON.parse(JSON.stringify(payload)),
    };
    return response;
  };

  private route(
    method: string,
    url: string,
    body: any
  ): { status: number; payload: unknown } {
    if (method === "POST" && url === "/sessions") {
      const state: SessionState = {
        session_id: `s${++this.counter}`,
        version: 1,
        width: body.width,
        height: body.height,
        annotation: body.contour,
        gt_angles: null,
        ...fakeAnalysis(body.contour),
      };
      this.sessions.set(state.session_id, state);
      return { status: 200, payload: state };
    }
    const contourMatch = url.match(/^\/sessions\/([^/]+)\/contour$/);
    if (method === "PUT" && contourMatch) {
      if (this.failNextPutWith) {
        const failure = this.failNextPutWith;
        this.failNextPutWith = null;
        return {
          status: failure.status,
          payload: { error: failure.error, detail: failure.detail },
        };
      }
      const session = this.sessions.get(contourMatch[1]);
      if (!session) return this.notFound(contourMatch[1]);
      const next: SessionState = {
        ...session,
        annotation: body,
        version: session.version + 1,
        ...fakeAnalysis(body),
      };
      this.sessions.set(session.session_id, next);
      return { status: 200, payload: next };
    }
    const gtMatch = url.match(/^\/sessions\/([^/]+)\/gt-angles$/);
    if (method === "PUT" && gtMatch) {
      const session = this.sessions.get(gtMatch[1]);
      if (!session) return this.notFound(gtMatch[1]);
      const next: SessionState = {
        ...session,
        gt_angles: body,
        version: session.version + 1,
      };
      this.sessions.set(session.session_id, next);
      return { status: 200, payload: next };
    }
    const exportMatch = url.match(/^\/sessions\/([^/]+)\/export$/);
    if (method === "GET" && exportMatch) {
      const session = this.sessions.get(exportMatch[1]);
      if (!session) return this.notFound(exportMatch[1]);
      const bundle: ExportBundle = { ...session, mask_base64: "bWFzaw==" };
      return { status: 200, payload: bundle };
    }
    const getMatch = url.match(/^\/sessions\/([^/]+)$/);
    if (method === "GET" && getMatch) {
      const session = this.sessions.get(getMatch[1]);
      if (!session) return this.notFound(getMatch[1]);
      return { status: 200, payload: session };
    }
    return {
      status: 404,
      payload: { error: "unknown route", detail: `${method} ${url}` },
    };
  }

  private notFound(id: string): { status: number; payload: unknown } {
    return {
      status: 404,
      payload: { error: "unknown session", detail: `no session ${id}` },
    };
  }
}

export function rectContour(
  xLeft = 100,
  xRight = 140,
  yMax = 480,
  count = 17
): Contour {
  const left: Point[] = [];
  const right: Point[] = [];
  for (let i = 0; i < count; i++) {
    const y = (yMax * i) / (count - 1);
    left.push([xLeft, y]);
    right.push([xRight, y]);
  }
  return { left, right };
}
