/** Deterministic preview colorization.
 *
 * Depth colormap (documented, fixed): the sentinel (no geometry, code 0) is
 * black; valid depth is mapped linearly from [near, far] onto a warm-to-cool
 * ramp — near = warm (red/orange), far = cool (blue) — by hue interpolation
 * from 0 deg (red) to 240 deg (blue) at full saturation and value.
 *
 * Entity ID colors: a fixed palette indexed by id (golden-angle hue walk),
 * id 0 (background) is black. Both mappings are pure functions so visual
 * regression tests are byte-stable. */

export type Rgb = [number, number, number];

function hsvToRgb(h: number, s: number, v: number): Rgb {
  const c = v * s;
  const hp = (((h % 360) + 360) % 360) / 60;
  const x = c * (1 - Math.abs((hp % 2) - 1));
  let r = 0;
  let g = 0;
  let b = 0;
  if (hp < 1) [r, g, b] = [c, x, 0];
  else if (hp < 2) [r, g, b] = [x, c, 0];
  else if (hp < 3) [r, g, b] = [0, c, x];
  else if (hp < 4) [r, g, b] = [0, x, c];
  else if (hp < 5) [r, g, b] = [x, 0, c];
  else [r, g, b] = [c, 0, x];
  const m = v - c;
  return [
    Math.round((r + m) * 255),
    Math.round((g + m) * 255),
    Math.round((b + m) * 255),
  ];
}

/** Map one metric depth value to RGB. depth <= 0 is the sentinel (black). */
export function depthToColor(depth: number, near: number, far: number): Rgb {
  if (depth <= 0) return [0, 0, 0];
  const t = Math.min(1, Math.max(0, (depth - near) / (far - near)));
  return hsvToRgb(240 * t, 1, 1); // 0 = red (near/warm) .. 240 = blue (far/cool)
}

/** Fixed per-entity color; id 0 (background) is black. */
export function idToColor(id: number): Rgb {
  if (id <= 0) return [0, 0, 0];
  const hue = (id * 137.50776405003785) % 360; // golden-angle walk
  return hsvToRgb(hue, 0.75, 0.95);
}

/** Colorize a raw depth buffer (row-major, meters) into an RGBA byte array. */
export function colorizeDepth(
  depth: Float64Array | number[],
  near: number,
  far: number
): Uint8ClampedArray {
  const out = new Uint8ClampedArray(depth.length * 4);
  for (let i = 0; i < depth.length; i++) {
    const [r, g, b] = depthToColor(depth[i], near, far);
    out[4 * i] = r;
    out[4 * i + 1] = g;
    out[4 * i + 2] = b;
    out[4 * i + 3] = 255;
  }
  return out;
}

/** Colorize an entity-ID buffer into an RGBA byte array. */
export function colorizeIds(ids: Int32Array | number[]): Uint8ClampedArray {
  const out = new Uint8ClampedArray(ids.length * 4);
  for (let i = 0; i < ids.length; i++) {
    const [r, g, b] = idToColor(ids[i]);
    out[4 * i] = r;
    out[4 * i + 1] = g;
    out[4 * i + 2] = b;
    out[4 * i + 3] = 255;
  }
  return out;
}
