/** Client-side keyframe interpolation mirroring the server's resolve rules:
 * exact at keyframes, lerp for positions/extents, shortest-arc slerp for
 * rotations, clamped outside the keyed range. Used only for live scrubbing;
 * exports always come from the service. */

import { lerp3, slerp } from "./math.js";
import type {
  BoxKeyframe,
  CameraKeyframe,
  SceneDocument,
  Vec3,
  Quat,
} from "./types.js";

export interface ResolvedBox {
  center: Vec3;
  halfExtents: Vec3;
  rotation: Quat;
}

export interface ResolvedPose {
  quaternion: Quat;
  translation: Vec3;
}

export interface ResolvedFrame {
  frame: number;
  boxes: Map<number, ResolvedBox>;
  cameraPose: ResolvedPose;
}

function sortedFrames(keyframes: Record<string, unknown>): number[] {
  return Object.keys(keyframes)
    .map((k) => parseInt(k, 10))
    .sort((a, b) => a - b);
}

/** Neighboring keyframes and blend factor; clamps outside the key range. */
export function bracket(frames: number[], f: number): [number, number, number] {
  if (frames.length === 0) throw new Error("empty keyframe track");
  if (f <= frames[0]) return [frames[0], frames[0], 0];
  const last = frames[frames.length - 1];
  if (f >= last) return [last, last, 0];
  let lo = 0;
  let hi = frames.length;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    if (frames[mid] <= f) lo = mid + 1;
    else hi = mid;
  }
  const f0 = frames[lo - 1];
  const f1 = frames[lo];
  return [f0, f1, (f - f0) / (f1 - f0)];
}

export function interpolateBox(
  keyframes: Record<string, BoxKeyframe>,
  frame: number
): ResolvedBox {
  const frames = sortedFrames(keyframes);
  const [f0, f1, t] = bracket(frames, frame);
  const a = keyframes[String(f0)];
  if (f0 === f1 || t === 0) {
    return { center: a.center, halfExtents: a.half_extents, rotation: a.rotation };
  }
  const b = keyframes[String(f1)];
  return {
    center: lerp3(a.center, b.center, t),
    halfExtents: lerp3(a.half_extents, b.half_extents, t),
    rotation: slerp(a.rotation, b.rotation, t),
  };
}

export function interpolatePose(
  keyframes: Record<string, CameraKeyframe>,
  frame: number
): ResolvedPose {
  const frames = sortedFrames(keyframes);
  const [f0, f1, t] = bracket(frames, frame);
  const a = keyframes[String(f0)];
  if (f0 === f1 || t === 0) {
    return { quaternion: a.quaternion, translation: a.translation };
  }
  const b = keyframes[String(f1)];
  return {
    quaternion: slerp(a.quaternion, b.quaternion, t),
    translation: lerp3(a.translation, b.translation, t),
  };
}

export function resolveFrame(doc: SceneDocument, frame: number): ResolvedFrame {
  if (frame < 0 || frame >= doc.frame_count) {
    throw new Error(`frame ${frame} outside [0, ${doc.frame_count})`);
  }
  const boxes = new Map<number, ResolvedBox>();
  for (const e of doc.entities) {
    boxes.set(e.id, interpolateBox(e.keyframes, frame));
  }
  return {
    frame,
    boxes,
    cameraPose: interpolatePose(doc.camera.keyframes, frame),
  };
}
