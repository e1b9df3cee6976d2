/** Timeline model: which frames are keyed per target, plus snapping. */

import type { SceneDocument, Target } from "./types.js";

export interface TimelineRow {
  target: Target;
  label: string;
  keyedFrames: number[];
}

export function timelineRows(doc: SceneDocument): TimelineRow[] {
  const rows: TimelineRow[] = doc.entities.map((e) => ({
    target: e.id,
    label: e.label,
    keyedFrames: Object.keys(e.keyframes)
      .map((k) => parseInt(k, 10))
      .sort((a, b) => a - b),
  }));
  rows.push({
    target: "camera",
    label: "camera",
    keyedFrames: Object.keys(doc.camera.keyframes)
      .map((k) => parseInt(k, 10))
      .sort((a, b) => a - b),
  });
  return rows;
}

export function isKeyed(doc: SceneDocument, target: Target, frame: number): boolean {
  if (target === "camera") return String(frame) in doc.camera.keyframes;
  const ent = doc.entities.find((e) => e.id === target);
  return ent !== undefined && String(frame) in ent.keyframes;
}

/** Nearest keyed frame in the given direction, or null at the track's end. */
export function nextKeyedFrame(
  keyedFrames: number[],
  from: number,
  direction: 1 | -1
): number | null {
  const candidates =
    direction === 1
      ? keyedFrames.filter((f) => f > from)
      : keyedFrames.filter((f) => f < from);
  if (candidates.length === 0) return null;
  return direction === 1 ? Math.min(...candidates) : Math.max(...candidates);
}

/** Optional grid snapping for gizmo drags (off by default). */
export function snap(value: number, grid: number | null): number {
  if (!grid || grid <= 0) return value;
  return Math.round(value / grid) * grid;
}
