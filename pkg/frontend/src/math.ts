/** Quaternion and vector helpers mirroring the server's interpolation math
 * (unit quaternions in w,x,y,z order; shortest-arc slerp). Scrubbing uses
 * these for 60 fps responsiveness; authoritative values always come from the
 * service. */

import type { Quat, Vec3 } from "./types.js";

export function lerp3(a: Vec3, b: Vec3, t: number): Vec3 {
  return [
    (1 - t) * a[0] + t * b[0],
    (1 - t) * a[1] + t * b[1],
    (1 - t) * a[2] + t * b[2],
  ];
}

export function normalizeQuat(q: Quat): Quat {
  const n = Math.hypot(q[0], q[1], q[2], q[3]);
  if (n === 0) throw new Error("zero quaternion");
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

/** Shortest-arc spherical interpolation; matches the server rule set. */
export function slerp(q0in: Quat, q1in: Quat, t: number): Quat {
  const q0 = normalizeQuat(q0in);
  let q1 = normalizeQuat(q1in);
  let dot = q0[0] * q1[0] + q0[1] * q1[1] + q0[2] * q1[2] + q0[3] * q1[3];
  if (dot < 0) {
    q1 = [-q1[0], -q1[1], -q1[2], -q1[3]];
    dot = -dot;
  }
  let w0: number;
  let w1: number;
  if (dot > 1 - 1e-10) {
    w0 = 1 - t; // nearly parallel: lerp + renormalize
    w1 = t;
  } else {
    const theta = Math.acos(Math.min(dot, 1));
    const s = Math.sin(theta);
    w0 = Math.sin((1 - t) * theta) / s;
    w1 = Math.sin(t * theta) / s;
  }
  return normalizeQuat([
    w0 * q0[0] + w1 * q1[0],
    w0 * q0[1] + w1 * q1[1],
    w0 * q0[2] + w1 * q1[2],
    w0 * q0[3] + w1 * q1[3],
  ]);
}

/** Row-major 3x3 rotation matrix of a unit quaternion. */
export function quatToMatrix(qin: Quat): number[] {
  const [w, x, y, z] = normalizeQuat(qin);
  return [
    1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
    2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
    2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y),
  ];
}

export function applyMatrix(m: number[], v: Vec3): Vec3 {
  return [
    m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
    m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
    m[6] * v[0] + m[7] * v[1] + m[8] * v[2],
  ];
}

export function rotateByQuat(q: Quat, v: Vec3): Vec3 {
  return applyMatrix(quatToMatrix(q), v);
}

export function add3(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function mul3(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}
