import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { DEBOUNCE_MS, SessionStore } from "../src/store.js";
import { cloneContour } from "../src/types.js";
import { MockService, rectContour } from "./helpers.js";

function makeStore(service: MockService): SessionStore {
  return new SessionStore(new ApiClient("", service.fetch));
}

function putCount(service: MockService): number {
  return service.traffic.filter(
    (t) => t.method === "PUT" && t.url.endsWith("/contour")
  ).length;
}

describe("SessionStore", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  async function createdStore(service: MockService): Promise<SessionStore> {
    const store = makeStore(service);
    await store.createSession(rectContour(), 256, 512);
    return store;
  }

  it("commits a drag on the trailing edge of one debounce window", async () => {
    const service = new MockService();
    const store = await createdStore(service);
    const moved = cloneContour(store.contour!);
    moved.left[8][0] -= 30;
    store.setContour(moved);
    expect(putCount(service)).toBe(0); // nothing sent mid-window
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    expect(putCount(service)).toBe(1);
    expect(store.state!.version).toBe(2);
    expect(store.state!.annotation.left[8][0]).toBe(moved.left[8][0]);
  });

  it("coalesces rapid moves into at most one request per window", async () => {
    const service = new MockService();
    const store = await createdStore(service);
    for (let step = 0; step < 20; step++) {
      const draft = cloneContour(store.contour!);
      draft.left[8][0] = 100 - step;
      store.setContour(draft);
      await vi.advanceTimersByTimeAsync(10);
    }
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    // 20 moves over 200 ms with a 100 ms trailing debounce: only the
    // final position is committed
    expect(putCount(service)).toBe(1);
    expect(store.state!.annotation.left[8][0]).toBe(100 - 19);
  });

  it("sends nothing for a no-op drag back to the original position", async () => {
    const service = new MockService();
    const store = await createdStore(service);
    const original = cloneContour(store.contour!);
    const moved = cloneContour(original);
    moved.left[4][0] -= 15;
    store.setContour(moved);
    store.setContour(original); // released back where it started
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS * 2);
    expect(putCount(service)).toBe(0);
    expect(store.state!.version).toBe(1);
  });

  it("discards stale responses so the version never decreases", async () => {
    const service = new MockService();
    const store = await createdStore(service);
    const moved = cloneContour(store.contour!);
    moved.right[3][0] += 12;
    store.setContour(moved);
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    const fresh = store.state!;
    expect(fresh.version).toBe(2);
    const stale = { ...fresh, version: 1, session_id: fresh.session_id };
    expect(store.applyResponse(stale)).toBe(false);
    expect(store.state!.version).toBe(2);
  });

  it("keeps a single request in flight and re-commits the newest draft", async () => {
    const service = new MockService();
    const store = await createdStore(service);
    // slow down the first PUT so a second draft arrives while in flight
    let release: (() => void) | null = null;
    const rawFetch = service.fetch;
    const gatedFetch: typeof rawFetch = async (url, init) => {
      if (init?.method === "PUT" && url.endsWith("/contour") && !release) {
        await new Promise<void>((resolve) => {
          release = resolve;
        });
      }
      return rawFetch(url, init);
    };
    const gatedStore = new SessionStore(new ApiClient("", gatedFetch));
    await gatedStore.createSession(rectContour(), 256, 512);

    const first = cloneContour(gatedStore.contour!);
    first.left[5][0] -= 10;
    gatedStore.setContour(first);
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);

    const second = cloneContour(first);
    second.left[5][0] -= 20;
    gatedStore.setContour(second);
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);

    release!();
    await vi.runAllTimersAsync();
    expect(gatedStore.state!.annotation.left[5][0]).toBe(second.left[5][0]);
  });

  it("snaps back and records the violation on a 422", async () => {
    const service = new MockService();
    const store = await createdStore(service);
    service.failNextPutWith = {
      status: 422,
      error: "invalid geometry",
      detail: "left contour must contain 17 points, got 16",
    };
    const bad = cloneContour(store.contour!);
    bad.left[2][0] += 60;
    store.setContour(bad);
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    expect(store.lastError).toContain("left contour must contain 17 points");
    // draft dropped: handles render the last good annotation again
    expect(store.contour).toEqual(store.state!.annotation);
    expect(store.state!.version).toBe(1);
  });

  it("stores GT angles through the service", async () => {
    const service = new MockService();
    const store = await createdStore(service);
    await store.setGtAngles({ mt: 21.5, pt: 8, tl: 12 });
    expect(store.state!.gt_angles).toEqual({ mt: 21.5, pt: 8, tl: 12 });
    expect(store.state!.version).toBe(2);
  });
});
