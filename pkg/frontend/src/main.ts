// Browser bootstrap: wires the canvas, pointer events, readout panel, and
// export/import buttons to the session store. All geometry comes from the
// annotation service; this file is glue only.

import { ApiClient } from "./api.js";
import { DragController } from "./drag.js";
import { drawScene, readout, type Canvas2D } from "./render.js";
import { SessionStore } from "./store.js";
import type { Contour, ExportBundle, Point } from "./types.js";

const WIDTH = 256;
const HEIGHT = 512;

function defaultContour(): Contour {
  const left: Point[] = [];
  const right: Point[] = [];
  for (let i = 0; i < 17; i++) {
    const y = 20 + ((HEIGHT - 40) * i) / 16;
    left.push([WIDTH / 2 - 22, y]);
    right.push([WIDTH / 2 + 22, y]);
  }
  return { left, right };
}

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const canvas = element<HTMLCanvasElement>("scene");
  canvas.width = WIDTH;
  canvas.height = HEIGHT;
  const ctx = canvas.getContext("2d") as unknown as Canvas2D;

  const api = new ApiClient("", fetch.bind(globalThis));
  const store = new SessionStore(api);
  const drag = new DragController(store, WIDTH, HEIGHT);

  const redraw = () => {
    drawScene(
      ctx,
      { state: store.state, contour: store.contour, gtHandles: drag.gtHandles },
      WIDTH,
      HEIGHT
    );
    const model = readout(store.state, drag.gtHandles, store.lastError);
    for (const key of ["mt", "pt", "tl"] as const) {
      element(`slope-${key}`).textContent = model.slope[key];
      element(`hybrid-${key}`).textContent = model.hybrid[key];
      element(`gt-${key}`).textContent = model.gtLocal?.[key] ?? "-";
    }
    element("version").textContent = String(model.version);
    element("error").textContent = model.error ?? "";
  };

  store.subscribe(redraw);

  const position = (event: PointerEvent): Point => {
    const rect = canvas.getBoundingClientRect();
    return [event.clientX - rect.left, event.clientY - rect.top];
  };
  canvas.addEventListener("pointerdown", (event) => {
    const [x, y] = position(event);
    if (drag.pointerDown(x, y)) canvas.setPointerCapture(event.pointerId);
  });
  canvas.addEventListener("pointermove", (event) => {
    const [x, y] = position(event);
    drag.pointerMove(x, y);
    redraw();
  });
  canvas.addEventListener("pointerup", () => {
    drag.pointerUp();
    redraw();
  });

  element("export").addEventListener("click", async () => {
    const bundle = await store.exportBundle();
    const blob = new Blob([JSON.stringify(bundle, null, 2)], {
      type: "application/json",
    });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `annotation-${bundle.session_id}.json`;
    link.click();
    URL.revokeObjectURL(link.href);
  });

  element<HTMLInputElement>("import").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    const bundle = JSON.parse(await file.text()) as ExportBundle;
    await store.importBundle(bundle);
    input.value = "";
  });

  element("reset").addEventListener("click", () => {
    void store.createSession(defaultContour(), WIDTH, HEIGHT);
  });

  await store.createSession(defaultContour(), WIDTH, HEIGHT);
  redraw();
}

void boot();
