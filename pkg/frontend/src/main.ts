/** Browser entry point. Expects `?api=<service-url>&scene=<id>` in the URL;
 * wires the editor state to a canvas viewport, a timeline strip, a preview
 * pane, an entity label panel, and export buttons. */

import { SceneClient, ApiError } from "./api.js";
import { EditorState } from "./editor.js";
import { resolveFrame } from "./interpolate.js";
import { idToColor } from "./colormap.js";
import { boxWireframe, cameraFrustum } from "./viewport.js";
import { timelineRows, isKeyed } from "./timeline.js";
import type { ResolvedPose } from "./interpolate.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function navigationView(): ResolvedPose {
  // fixed 3/4 navigation view looking at the origin from above-left
  return {
    quaternion: [0.8924, 0.2391, -0.3696, -0.0990],
    translation: [0, 0.8, 6],
  };
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const api = params.get("api") ?? "http://127.0.0.1:8000";
  const sceneId = params.get("scene");
  if (!sceneId) {
    el<HTMLDivElement>("status").textContent =
      "pass ?scene=<id> (and optionally ?api=<url>) in the query string";
    return;
  }

  const client = new SceneClient(api);
  const editor = new EditorState(client, sceneId);
  await editor.load();

  const canvas = el<HTMLCanvasElement>("viewport");
  const ctx = canvas.getContext("2d")!;
  const preview = el<HTMLImageElement>("preview");
  const timeline = el<HTMLDivElement>("timeline");
  const status = el<HTMLDivElement>("status");
  const frameInput = el<HTMLInputElement>("frame");
  const kindSelect = el<HTMLSelectElement>("preview-kind");

  function note(message: string): void {
    status.textContent = message;
  }

  function drawViewport(): void {
    const doc = editor.document!;
    const view = navigationView();
    const k = doc.camera.intrinsics;
    const resolved = resolveFrame(doc, editor.activeFrame);
    ctx.fillStyle = "#111";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    const sx = canvas.width / k.width;
    const sy = canvas.height / k.height;
    for (const [id, box] of resolved.boxes) {
      const [r, g, b] = idToColor(id);
      ctx.strokeStyle = `rgb(${r},${g},${b})`;
      for (const seg of boxWireframe(box, view, k)) {
        ctx.beginPath();
        ctx.moveTo(seg.a[0] * sx, seg.a[1] * sy);
        ctx.lineTo(seg.b[0] * sx, seg.b[1] * sy);
        ctx.stroke();
      }
      const ent = doc.entities.find((e) => e.id === id);
      const first = boxWireframe(box, view, k)[0];
      if (ent && first) {
        ctx.fillStyle = ctx.strokeStyle;
        ctx.fillText(ent.label, first.a[0] * sx + 4, first.a[1] * sy - 4);
      }
    }
    ctx.strokeStyle = "#fff";
    for (const seg of cameraFrustum(resolved.cameraPose, k, view)) {
      ctx.beginPath();
      ctx.moveTo(seg.a[0] * sx, seg.a[1] * sy);
      ctx.lineTo(seg.b[0] * sx, seg.b[1] * sy);
      ctx.stroke();
    }
  }

  async function refreshPreview(): Promise<void> {
    const kind = kindSelect.value === "id" ? "id" : "depth";
    try {
      const bytes = await editor.refreshPreview(kind);
      const copy = new Uint8Array(bytes);
      preview.src = URL.createObjectURL(new Blob([copy.buffer], { type: "image/png" }));
    } catch (err) {
      if (err instanceof ApiError) note(err.message);
      else throw err;
    }
  }

  function drawTimeline(): void {
    const doc = editor.document!;
    timeline.replaceChildren();
    for (const row of timelineRows(doc)) {
      const rowEl = document.createElement("div");
      rowEl.className = "timeline-row";
      const label = document.createElement("span");
      label.textContent = row.label;
      rowEl.appendChild(label);
      for (let f = 0; f < doc.frame_count; f++) {
        const cell = document.createElement("button");
        cell.className = isKeyed(doc, row.target, f) ? "key" : "nokey";
        cell.title = `${row.label} @ ${f}`;
        cell.addEventListener("click", () => {
          editor.select(row.target);
          editor.scrub(f);
          frameInput.value = String(f);
          void redraw();
        });
        rowEl.appendChild(cell);
      }
      timeline.appendChild(rowEl);
    }
  }

  async function redraw(): Promise<void> {
    drawViewport();
    drawTimeline();
    await refreshPreview();
    note(`scene ${sceneId} @ revision ${editor.revision}, frame ${editor.activeFrame}`);
  }

  frameInput.addEventListener("change", () => {
    editor.scrub(parseInt(frameInput.value, 10) || 0);
    void redraw();
  });
  kindSelect.addEventListener("change", () => void refreshPreview());

  el<HTMLButtonElement>("export-camera").addEventListener("click", async () => {
    const text = await editor.exportCameraTxt();
    const url = URL.createObjectURL(new Blob([text], { type: "text/plain" }));
    const a = document.createElement("a");
    a.href = url;
    a.download = "camera.txt";
    a.click();
  });

  el<HTMLButtonElement>("export-bundle").addEventListener("click", async () => {
    const outDir = window.prompt("server-side output directory for the bundle");
    if (!outDir) return;
    try {
      const meta = await editor.exportBundle(outDir);
      note(`bundle written: ${JSON.stringify(meta)}`);
    } catch (err) {
      if (err instanceof ApiError) note(err.message);
      else throw err;
    }
  });

  await redraw();
}

void start();
