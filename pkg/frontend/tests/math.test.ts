import { describe, expect, it } from "vitest";

import { applyMatrix, normalizeQuat, quatToMatrix, slerp } from "../src/math.js";
import type { Quat, Vec3 } from "../src/types.js";

const IDENT: Quat = [1, 0, 0, 0];

function axisAngle(axis: Vec3, angle: number): Quat {
  const n = Math.hypot(...axis);
  const s = Math.sin(angle / 2) / n;
  return [Math.cos(angle / 2), axis[0] * s, axis[1] * s, axis[2] * s];
}

describe("slerp", () => {
  it("is exact at the endpoints", () => {
    const q = axisAngle([0, 1, 0], 0.8);
    expect(slerp(IDENT, q, 0)).toEqual(normalizeQuat(IDENT));
    const end = slerp(IDENT, q, 1);
    for (let i = 0; i < 4; i++) expect(end[i]).toBeCloseTo(q[i], 12);
  });

  it("halves a rotation at t=0.5", () => {
    const q = axisAngle([0, 0, 1], Math.PI / 2);
    const half = slerp(IDENT, q, 0.5);
    const want = axisAngle([0, 0, 1], Math.PI / 4);
    for (let i = 0; i < 4; i++) expect(half[i]).toBeCloseTo(want[i], 12);
  });

  it("returns unit quaternions", () => {
    const a = axisAngle([1, 2, 3], 1.1);
    const b = axisAngle([-2, 1, 0.5], 2.4);
    for (const t of [0.1, 0.37, 0.5, 0.93]) {
      const q = slerp(a, b, t);
      expect(Math.hypot(...q)).toBeCloseTo(1, 12);
    }
  });

  it("takes the shortest arc when the quaternions have opposite sign", () => {
    const q = axisAngle([0, 1, 0], 0.4);
    const negQ: Quat = [-q[0], -q[1], -q[2], -q[3]];
    const mid = slerp(IDENT, negQ, 0.5);
    const want = axisAngle([0, 1, 0], 0.2);
    // same rotation regardless of quaternion sign
    const sign = Math.sign(mid[0]) === Math.sign(want[0]) ? 1 : -1;
    for (let i = 0; i < 4; i++) expect(sign * mid[i]).toBeCloseTo(want[i], 10);
  });

  it("handles nearly parallel inputs without NaN", () => {
    const q = axisAngle([0, 1, 0], 1e-13);
    const mid = slerp(IDENT, q, 0.5);
    expect(mid.every(Number.isFinite)).toBe(true);
    expect(Math.hypot(...mid)).toBeCloseTo(1, 12);
  });
});

describe("quatToMatrix", () => {
  it("gives the identity for the identity quaternion", () => {
    expect(quatToMatrix(IDENT)).toEqual([1, 0, 0, 0, 1, 0, 0, 0, 1]);
  });

  it("is orthonormal with determinant 1", () => {
    const m = quatToMatrix(axisAngle([1, -1, 2], 0.9));
    const rows: Vec3[] = [
      [m[0], m[1], m[2]],
      [m[3], m[4], m[5]],
      [m[6], m[7], m[8]],
    ];
    for (let i = 0; i < 3; i++) {
      for (let j = 0; j < 3; j++) {
        const dot = rows[i][0] * rows[j][0] + rows[i][1] * rows[j][1] + rows[i][2] * rows[j][2];
        expect(dot).toBeCloseTo(i === j ? 1 : 0, 12);
      }
    }
    const det =
      m[0] * (m[4] * m[8] - m[5] * m[7]) -
      m[1] * (m[3] * m[8] - m[5] * m[6]) +
      m[2] * (m[3] * m[7] - m[4] * m[6]);
    expect(det).toBeCloseTo(1, 12);
  });

  it("rotates a vector by the quarter turn about z", () => {
    const m = quatToMatrix(axisAngle([0, 0, 1], Math.PI / 2));
    const v = applyMatrix(m, [1, 0, 0]);
    expect(v[0]).toBeCloseTo(0, 12);
    expect(v[1]).toBeCloseTo(1, 12);
    expect(v[2]).toBeCloseTo(0, 12);
  });
});
