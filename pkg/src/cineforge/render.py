"""Software rasterizer: resolved scenes -> per-frame metric depth maps and
entity-ID maps.

Rules fixed for bit-exact reproducibility:
  * pixel centers sampled at (x + 0.5, y + 0.5), top-left origin
  * depth is camera-space z; per-pixel z-buffer keeps the nearest surface
  * boxes are opaque solids rasterized as 12 triangles, no backface culling
  * triangles clipped against the near plane; surfaces beyond far are dropped
  * background sentinel: depth 0.0, id 0
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import BOX_TRIANGLES, Box3, Intrinsics, Pose
from .scene import Scene, SceneSample, resolve


@dataclass(frozen=True)
class RenderSettings:
    width: int | None = None   # None: use intrinsics raster size
    height: int | None = None
    near: float = 0.05
    far: float = 1000.0

    def __post_init__(self):
        if not (0 < self.near < self.far):
            raise ValueError("need 0 < near < far")


def _scaled_intrinsics(k: Intrinsics, width: int, height: int) -> Intrinsics:
    if width == k.width and height == k.height:
        return k
    sx = width / k.width
    sy = height / k.height
    return Intrinsics(k.fx * sx, k.fy * sy, k.cx * sx, k.cy * sy, width, height)


def _clip_near(tri_cam: np.ndarray, near: float) -> list[np.ndarray]:
    """Sutherland-Hodgman clip of one camera-space triangle against z >= near.
    Returns 0, 1, or 2 triangles."""
    inside = tri_cam[:, 2] >= near
    n_in = int(inside.sum())
    if n_in == 0:
        return []
    if n_in == 3:
        return [tri_cam]
    poly = []
    for i in range(3):
        a = tri_cam[i]
        b = tri_cam[(i + 1) % 3]
        if inside[i]:
            poly.append(a)
        if inside[i] != inside[(i + 1) % 3]:
            t = (near - a[2]) / (b[2] - a[2])
            poly.append(a + t * (b - a))
    tris = []
    for i in range(1, len(poly) - 1):
        tris.append(np.stack([poly[0], poly[i], poly[i + 1]]))
    return tris


def _raster_triangle(tri_cam: np.ndarray, k: Intrinsics, depth_buf, id_buf, entity_id, far):
    """Rasterize one camera-space triangle (all z >= near) into the buffers."""
    z = tri_cam[:, 2]
    u = k.fx * tri_cam[:, 0] / z + k.cx
    v = k.fy * tri_cam[:, 1] / z + k.cy
    h, w = depth_buf.shape

    # pixel-center coverage window
    x0 = max(int(np.floor(u.min() - 0.5)), 0)
    x1 = min(int(np.ceil(u.max() - 0.5)), w - 1)
    y0 = max(int(np.floor(v.min() - 0.5)), 0)
    y1 = min(int(np.ceil(v.max() - 0.5)), h - 1)
    if x0 > x1 or y0 > y1:
        return

    px = np.arange(x0, x1 + 1) + 0.5
    py = np.arange(y0, y1 + 1) + 0.5
    gx, gy = np.meshgrid(px, py)

    # signed edge functions; accept both windings (clipping may flip)
    area = (u[1] - u[0]) * (v[2] - v[0]) - (v[1] - v[0]) * (u[2] - u[0])
    if abs(area) < 1e-14:
        return
    w0 = (u[2] - u[1]) * (gy - v[1]) - (v[2] - v[1]) * (gx - u[1])
    w1 = (u[0] - u[2]) * (gy - v[2]) - (v[0] - v[2]) * (gx - u[2])
    w2 = (u[1] - u[0]) * (gy - v[0]) - (v[1] - v[0]) * (gx - u[0])
    b0, b1, b2 = w0 / area, w1 / area, w2 / area
    cover = (b0 >= 0) & (b1 >= 0) & (b2 >= 0)
    if not np.any(cover):
        return

    # perspective-correct depth: 1/z interpolates linearly in screen space
    inv_z = b0 / z[0] + b1 / z[1] + b2 / z[2]
    with np.errstate(divide="ignore"):
        zpix = 1.0 / inv_z
    cover &= np.isfinite(zpix) & (zpix <= far)

    sub_d = depth_buf[y0 : y1 + 1, x0 : x1 + 1]
    sub_i = id_buf[y0 : y1 + 1, x0 : x1 + 1]
    win = cover & (zpix < sub_d)
    sub_d[win] = zpix[win]
    sub_i[win] = entity_id


def render_frame(
    sample: SceneSample, k: Intrinsics, settings: RenderSettings | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Rasterize one resolved frame. Returns (depth, ids): float64 (h, w) with
    0.0 background sentinel, and int32 (h, w) with 0 background."""
    settings = settings or RenderSettings()
    width = settings.width or k.width
    height = settings.height or k.height
    kk = _scaled_intrinsics(k, width, height)

    depth_buf = np.full((height, width), np.inf)
    id_buf = np.zeros((height, width), dtype=np.int32)
    R = sample.camera_pose.rotation.matrix()
    t = sample.camera_pose.translation

    for entity_id in sorted(sample.boxes):
        corners_cam = sample.boxes[entity_id].corners() @ R.T + t
        for tri_idx in BOX_TRIANGLES:
            for tri in _clip_near(corners_cam[tri_idx], settings.near):
                _raster_triangle(tri, kk, depth_buf, id_buf, entity_id, settings.far)

    depth = np.where(np.isfinite(depth_buf), depth_buf, 0.0)
    return depth, id_buf


def render_sequence(
    scene: Scene, settings: RenderSettings | None = None
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Render every frame of the scene; element f uses resolve(scene, f)."""
    k = scene.camera.intrinsics
    return [
        render_frame(resolve(scene, f), k, settings) for f in range(scene.frame_count)
    ]


def raycast_frame(
    sample: SceneSample, k: Intrinsics, settings: RenderSettings | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Brute-force per-pixel ray-box reference renderer (slab test per box).

    Independent of the triangle rasterizer; used as its oracle in tests and
    exercised by `validate`-style debugging. Same conventions and outputs as
    render_frame.
    """
    settings = settings or RenderSettings()
    width = settings.width or k.width
    height = settings.height or k.height
    kk = _scaled_intrinsics(k, width, height)

    xs = (np.arange(width) + 0.5 - kk.cx) / kk.fx
    ys = (np.arange(height) + 0.5 - kk.cy) / kk.fy
    dx, dy = np.meshgrid(xs, ys)
    dirs = np.stack([dx, dy, np.ones_like(dx)], axis=-1)  # z-component 1: t == depth

    cam_to_world = sample.camera_pose
    R = cam_to_world.rotation.matrix()
    t = cam_to_world.translation

    best = np.full((height, width), np.inf)
    ids = np.zeros((height, width), dtype=np.int32)
    for entity_id in sorted(sample.boxes):
        box = sample.boxes[entity_id]
        Rb = box.rotation.matrix()
        # ray origin/direction in box-local frame; camera origin is -R^T t in world
        origin_world = -(R.T @ t)
        o = (origin_world - box.center) @ Rb
        d = dirs @ R @ Rb  # world dirs = dirs @ R, then into local frame

        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (-box.half_extents - o) / d
            t2 = (box.half_extents - o) / d
        lo = np.minimum(t1, t2)
        hi = np.maximum(t1, t2)
        # rays parallel to a slab: inside iff origin within that slab
        par = np.abs(d) < 1e-15
        inside = np.abs(o) <= box.half_extents
        lo = np.where(par, np.where(inside, -np.inf, np.inf), lo)
        hi = np.where(par, np.where(inside, np.inf, -np.inf), hi)
        tmin = lo.max(axis=-1)
        tmax = hi.min(axis=-1)
        hit = tmax >= tmin
        # nearest surface not closer than the near plane (matches clipping)
        tpick = np.where(tmin >= settings.near, tmin, tmax)
        hit &= (tpick >= settings.near) & (tpick <= settings.far)
        win = hit & (tpick < best)
        best[win] = tpick[win]
        ids[win] = entity_id

    depth = np.where(np.isfinite(best), best, 0.0)
    return depth, ids
