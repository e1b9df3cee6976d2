"""Condition bundle: the exported directory consumed by a video generator.

Layout:
    depth/%05d.png (PNG16, meters = code * depth_scale) or depth/%05d.pfm
    idmap/%05d.png (indexed PNG, palette index = entity id)
    camera.txt     (F lines x 12 reals, row-major R then t)
    labels.json    (entity id -> class string)
    meta.json      (fps, frame_count, intrinsics, depth encoding + scale,
                    raster size, near/far)
"""

from __future__ import annotations

import json
import os

import numpy as np

from ..render import RenderSettings, render_sequence
from ..scene import Scene, export_camera_rt
from .camera_txt import parse_camera_txt, write_camera_txt
from .rasters import encode_depth_png16, encode_idmap_png, write_pfm
from .scene_json import atomic_write_text


def _intrinsics_dict(k):
    return {"fx": k.fx, "fy": k.fy, "cx": k.cx, "cy": k.cy,
            "width": k.width, "height": k.height}


def export_condition_bundle(
    scene: Scene,
    out_dir: str,
    settings: RenderSettings | None = None,
    depth_scale: float = 0.001,
    depth_encoding: str = "png16",
) -> dict:
    """Render all frames of the scene and write the bundle. Returns meta."""
    if depth_encoding not in ("png16", "pfm"):
        raise ValueError(f"unknown depth encoding {depth_encoding!r}")
    settings = settings or RenderSettings()
    os.makedirs(os.path.join(out_dir, "depth"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "idmap"), exist_ok=True)

    frames = render_sequence(scene, settings)
    for f, (depth, ids) in enumerate(frames):
        if depth_encoding == "png16":
            payload = encode_depth_png16(depth, depth_scale)
            depth_path = os.path.join(out_dir, "depth", f"{f:05d}.png")
        else:
            payload = write_pfm(depth)
            depth_path = os.path.join(out_dir, "depth", f"{f:05d}.pfm")
        with open(depth_path, "wb") as fh:
            fh.write(payload)
        with open(os.path.join(out_dir, "idmap", f"{f:05d}.png"), "wb") as fh:
            fh.write(encode_idmap_png(ids))

    write_camera_txt(os.path.join(out_dir, "camera.txt"), export_camera_rt(scene))
    labels = {str(e.id): e.label for e in scene.entities}
    atomic_write_text(os.path.join(out_dir, "labels.json"), json.dumps(labels, indent=2) + "\n")

    height, width = frames[0][0].shape if frames else (settings.height, settings.width)
    meta = {
        "fps": scene.fps,
        "frame_count": scene.frame_count,
        "width": width,
        "height": height,
        "intrinsics": _intrinsics_dict(scene.camera.intrinsics),
        "depth_encoding": depth_encoding,
        "depth_scale": depth_scale,
        "near": settings.near,
        "far": settings.far,
    }
    atomic_write_text(os.path.join(out_dir, "meta.json"), json.dumps(meta, indent=2) + "\n")
    return meta


def validate_bundle(bundle_dir: str) -> list[str]:
    """Self-consistency checks; returns human-readable violations."""
    out: list[str] = []

    def missing(name):
        out.append(f"missing {name}")

    meta_path = os.path.join(bundle_dir, "meta.json")
    if not os.path.exists(meta_path):
        missing("meta.json")
        return out
    meta = json.load(open(meta_path))
    frame_count = meta.get("frame_count")
    ext = "pfm" if meta.get("depth_encoding") == "pfm" else "png"

    for sub, suffix in (("depth", ext), ("idmap", "png")):
        d = os.path.join(bundle_dir, sub)
        if not os.path.isdir(d):
            missing(f"{sub}/ directory")
            continue
        files = sorted(f for f in os.listdir(d) if f.endswith("." + suffix))
        if len(files) != frame_count:
            out.append(f"{sub}/ has {len(files)} frames, meta says {frame_count}")
        expected = [f"{i:05d}.{suffix}" for i in range(len(files))]
        if files != expected:
            out.append(f"{sub}/ file names are not contiguous %05d frames")

    cam_path = os.path.join(bundle_dir, "camera.txt")
    if not os.path.exists(cam_path):
        missing("camera.txt")
    else:
        try:
            rt = parse_camera_txt(cam_path)
            if rt.shape[0] != frame_count:
                out.append(f"camera.txt has {rt.shape[0]} rows, meta says {frame_count}")
        except ValueError as e:
            out.append(f"camera.txt: {e}")

    labels_path = os.path.join(bundle_dir, "labels.json")
    if not os.path.exists(labels_path):
        missing("labels.json")
    else:
        labels = json.load(open(labels_path))
        known = {int(k) for k in labels}
        idmap_dir = os.path.join(bundle_dir, "idmap")
        if os.path.isdir(idmap_dir):
            from .rasters import decode_idmap_png

            for name in sorted(os.listdir(idmap_dir)):
                ids = decode_idmap_png(open(os.path.join(idmap_dir, name), "rb").read())
                present = set(np.unique(ids)) - {0}
                orphans = present - known
                if orphans:
                    out.append(f"idmap/{name}: ids {sorted(orphans)} not in labels.json")
    return out
