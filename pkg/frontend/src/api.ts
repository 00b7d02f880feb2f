import type { Contour, ExportBundle, GtTriple, SessionState } from "./types.js";

export interface HttpResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string }
) => Promise<HttpResponse>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly error: string,
    readonly detail: string
  ) {
    super(`${error}: ${detail}`);
  }
}

/** Everything the session store needs from the service. */
export interface SessionApi {
  createSessionFromContour(
    contour: Contour,
    width: number,
    height: number
  ): Promise<SessionState>;
  getSession(sessionId: string): Promise<SessionState>;
  putContour(sessionId: string, contour: Contour): Promise<SessionState>;
  putGtAngles(sessionId: string, triple: GtTriple): Promise<SessionState>;
  exportSession(sessionId: string): Promise<ExportBundle>;
}

/** Thin typed client over the annotation service. All curve math lives on
 * the server; this client only moves JSON. */
export class ApiClient implements SessionApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as Record<string, unknown>;
    if (!response.ok) {
      throw new ApiError(
        response.status,
        String(payload.error ?? "request failed"),
        String(payload.detail ?? response.status)
      );
    }
    return payload as T;
  }

  createSessionFromContour(
    contour: Contour,
    width: number,
    height: number
  ): Promise<SessionState> {
    return this.request("POST", "/sessions", { contour, width, height });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  putContour(sessionId: string, contour: Contour): Promise<SessionState> {
    return this.request("PUT", `/sessions/${sessionId}/contour`, contour);
  }

  putGtAngles(sessionId: string, triple: GtTriple): Promise<SessionState> {
    return this.request("PUT", `/sessions/${sessionId}/gt-angles`, triple);
  }

  exportSession(sessionId: string): Promise<ExportBundle> {
    return this.request("GET", `/sessions/${sessionId}/export`);
  }
}
