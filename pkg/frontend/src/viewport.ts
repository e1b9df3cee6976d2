/** Viewport geometry: wireframe line segments for entity boxes and the scene
 * camera frustum, projected through a pinhole view. Pure functions; the DOM
 * layer just strokes the returned segments onto a canvas. */

import { add3, mul3, quatToMatrix, applyMatrix } from "./math.js";
import type { ResolvedBox, ResolvedPose } from "./interpolate.js";
import type { IntrinsicsDoc, Vec3 } from "./types.js";

export interface Segment2D {
  a: [number, number];
  b: [number, number];
}

/** Local-frame corner signs: bottom (-z) face counter-clockwise, then top. */
const CORNER_SIGNS: Vec3[] = [
  [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
  [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
];

const BOX_EDGES: [number, number][] = [
  [0, 1], [1, 2], [2, 3], [3, 0], // bottom
  [4, 5], [5, 6], [6, 7], [7, 4], // top
  [0, 4], [1, 5], [2, 6], [3, 7], // verticals
];

export function boxCorners(box: ResolvedBox): Vec3[] {
  const m = quatToMatrix(box.rotation);
  return CORNER_SIGNS.map((s) => {
    const local: Vec3 = [
      s[0] * box.halfExtents[0],
      s[1] * box.halfExtents[1],
      s[2] * box.halfExtents[2],
    ];
    return add3(applyMatrix(m, local), box.center);
  });
}

/** World point -> camera frame under a world-to-camera pose. */
export function toCamera(pose: ResolvedPose, p: Vec3): Vec3 {
  const m = quatToMatrix(pose.quaternion);
  return add3(applyMatrix(m, p), pose.translation);
}

export function projectPoint(
  k: IntrinsicsDoc,
  pCam: Vec3
): [number, number] | null {
  if (pCam[2] <= 0) return null; // behind the camera
  return [
    (k.fx * pCam[0]) / pCam[2] + k.cx,
    (k.fy * pCam[1]) / pCam[2] + k.cy,
  ];
}

function projectEdges(
  k: IntrinsicsDoc,
  cornersCam: Vec3[],
  edges: [number, number][]
): Segment2D[] {
  const out: Segment2D[] = [];
  for (const [i, j] of edges) {
    const a = projectPoint(k, cornersCam[i]);
    const b = projectPoint(k, cornersCam[j]);
    // edges crossing the camera plane are dropped rather than clipped; the
    // viewport is navigational, the preview pane is the authoritative render
    if (a && b) out.push({ a, b });
  }
  return out;
}

/** Wireframe segments of one entity box under the given view. */
export function boxWireframe(
  box: ResolvedBox,
  view: ResolvedPose,
  k: IntrinsicsDoc
): Segment2D[] {
  const cam = boxCorners(box).map((c) => toCamera(view, c));
  return projectEdges(k, cam, BOX_EDGES);
}

/** Frustum segments for the scene camera drawn inside the navigation view:
 * apex at the camera center plus the four corner rays at the given depth. */
export function cameraFrustum(
  scenePose: ResolvedPose,
  k: IntrinsicsDoc,
  view: ResolvedPose,
  depth = 0.5
): Segment2D[] {
  // camera center in world space: R^T (0 - t)
  const m = quatToMatrix(scenePose.quaternion);
  const mt: number[] = [m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]];
  const center = applyMatrix(mt, mul3(scenePose.translation, -1));
  const cornersPix: [number, number][] = [
    [0, 0], [k.width, 0], [k.width, k.height], [0, k.height],
  ];
  const cornersWorld = cornersPix.map(([u, v]) => {
    const ray: Vec3 = [
      ((u - k.cx) / k.fx) * depth,
      ((v - k.cy) / k.fy) * depth,
      depth,
    ];
    return add3(applyMatrix(mt, ray), center);
  });
  const pts = [center, ...cornersWorld].map((p) => toCamera(view, p));
  const edges: [number, number][] = [
    [0, 1], [0, 2], [0, 3], [0, 4], // apex to corners
    [1, 2], [2, 3], [3, 4], [4, 1], // far rectangle
  ];
  return projectEdges(k, pts, edges);
}
