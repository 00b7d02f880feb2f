import { ApiError, type SessionApi } from "./api.js";
import {
  cloneContour,
  contoursEqual,
  type Contour,
  type ExportBundle,
  type GtTriple,
  type SessionState,
} from "./types.js";

export type StoreListener = (store: SessionStore) => void;

/** Trailing-edge debounce window for contour commits; 100 ms keeps the
 * request rate at or below 10 per second while a handle is dragged. */
export const DEBOUNCE_MS = 100;

/** Client-side session state.
 *
 * The rendered curve, centerline, samples, and angles always come from
 * the last server response; drags only move a local draft contour until
 * the debounced PUT commits it. Responses carrying a version not newer
 * than the current one are discarded, so the rendered version counter
 * never decreases.
 */
export class SessionStore {
  state: SessionState | null = null;
  lastError: string | null = null;

  private draftContour: Contour | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight = false;
  private dirtyWhileInflight = false;
  private listeners: StoreListener[] = [];

  constructor(
    private readonly api: SessionApi,
    private readonly debounceMs: number = DEBOUNCE_MS
  ) {}

  subscribe(listener: StoreListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this);
  }

  /** Contour the handles should render: local draft while dragging,
   * otherwise the server-acknowledged annotation. */
  get contour(): Contour | null {
    return this.draftContour ?? this.state?.annotation ?? null;
  }

  get version(): number {
    return this.state?.version ?? 0;
  }

  /** Adopt a server response unless it is stale. */
  applyResponse(response: SessionState): boolean {
    if (this.state && response.version <= this.state.version) {
      return false;
    }
    this.state = response;
    this.notify();
    return true;
  }

  async createSession(
    contour: Contour,
    width: number,
    height: number
  ): Promise<void> {
    const response = await this.api.createSessionFromContour(
      contour,
      width,
      height
    );
    this.state = response;
    this.draftContour = null;
    this.lastError = null;
    this.notify();
  }

  /** Move the draft contour (during a drag) and schedule a debounced
   * commit. A draft identical to the committed annotation is a no-op. */
  setContour(contour: Contour): void {
    this.draftContour = cloneContour(contour);
    this.notify();
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.commit();
    }, this.debounceMs);
  }

  private async commit(): Promise<void> {
    if (!this.state || !this.draftContour) return;
    if (contoursEqual(this.draftContour, this.state.annotation)) {
      this.draftContour = null;
      this.notify();
      return;
    }
    if (this.inflight) {
      this.dirtyWhileInflight = true;
      return;
    }
    const contour = cloneContour(this.draftContour);
    this.inflight = true;
    try {
      const response = await this.api.putContour(
        this.state.session_id,
        contour
      );
      if (this.applyResponse(response)) {
        // commit landed: drop the draft unless it moved again meanwhile
        if (
          this.draftContour &&
          contoursEqual(this.draftContour, response.annotation)
        ) {
          this.draftContour = null;
        }
      }
      this.lastError = null;
    } catch (error) {
      // invalid geometry: snap handles back to the last good annotation
      this.draftContour = null;
      this.lastError =
        error instanceof ApiError ? error.detail : String(error);
    } finally {
      this.inflight = false;
      this.notify();
      if (this.dirtyWhileInflight) {
        this.dirtyWhileInflight = false;
        void this.commit();
      }
    }
  }

  async setGtAngles(triple: GtTriple): Promise<void> {
    if (!this.state) return;
    try {
      const response = await this.api.putGtAngles(
        this.state.session_id,
        triple
      );
      this.applyResponse(response);
      this.lastError = null;
    } catch (error) {
      this.lastError =
        error instanceof ApiError ? error.detail : String(error);
      this.notify();
    }
  }

  async refresh(): Promise<void> {
    if (!this.state) return;
    this.applyResponse(await this.api.getSession(this.state.session_id));
  }

  /** Download payload for the current session, verbatim from the server. */
  async exportBundle(): Promise<ExportBundle> {
    if (!this.state) throw new Error("no active session");
    return this.api.exportSession(this.state.session_id);
  }

  /** Re-create a session from an exported bundle; recompute on the server
   * reproduces the same curve and angles. */
  async importBundle(bundle: ExportBundle): Promise<void> {
    await this.createSession(bundle.annotation, bundle.width, bundle.height);
    if (bundle.gt_angles) {
      await this.setGtAngles(bundle.gt_angles);
    }
  }
}
