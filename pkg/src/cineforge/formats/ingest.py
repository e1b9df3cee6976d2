"""Label-input ingestion: the on-disk layout holding external perception
outputs, checked for cross-file consistency before auto-labeling.

Layout:
    masks/%05d.png  indexed PNG per frame, palette index = entity id
    depth/%05d.png  PNG16 metric depth (scale in meta.json) or %05d.pfm
    camera.txt      native F x 12 world-to-camera rows
    tracks.csv      '# frame_of_reference: world|camera' comment, then header
                    entity_id,track_id,frame,x,y,z
    labels.json     entity id -> class string
    meta.json       intrinsics, depth encoding + scale
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from ..autolabel import FrameObservation, TrackSet, select_optimal_frame
from ..geometry import Intrinsics, Pose, Rot3
from .camera_txt import format_camera_txt, parse_camera_txt
from .rasters import decode_depth_png16, decode_idmap_png, encode_depth_png16, encode_idmap_png, read_pfm, write_pfm
from .scene_json import atomic_write_text


class ConsistencyError(ValueError):
    pass


def rt_row_to_pose(row: np.ndarray) -> Pose:
    return Pose(rotation=Rot3.from_matrix(np.asarray(row[:9]).reshape(3, 3)),
                translation=np.asarray(row[9:12]))


def pose_to_rt_row(pose: Pose) -> np.ndarray:
    return np.concatenate([pose.rotation.matrix().reshape(-1), pose.translation])


def _read_tracks_csv(path: str) -> tuple[dict[int, list[dict[int, np.ndarray]]], str]:
    frame_of_reference = "world"
    rows = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "frame_of_reference:" in line:
                    frame_of_reference = line.split("frame_of_reference:")[1].strip()
                    if frame_of_reference not in ("world", "camera"):
                        raise ConsistencyError(
                            f"{path}:{line_no}: frame_of_reference must be world|camera"
                        )
                continue
            rows.append((line_no, line))
    if not rows:
        raise ConsistencyError(f"{path}: no track rows")
    reader = csv.DictReader([r[1] for r in rows])
    required = {"entity_id", "track_id", "frame", "x", "y", "z"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise ConsistencyError(f"{path}: header must contain {sorted(required)}")
    tracks: dict[int, dict[int, dict[int, np.ndarray]]] = {}
    for i, rec in enumerate(reader, start=2):
        try:
            eid = int(rec["entity_id"])
            tid = int(rec["track_id"])
            frame = int(rec["frame"])
            p = np.array([float(rec["x"]), float(rec["y"]), float(rec["z"])])
        except (TypeError, ValueError) as e:
            raise ConsistencyError(f"{path}: row {i}: {e}") from e
        tracks.setdefault(eid, {}).setdefault(tid, {})[frame] = p
    per_entity = {eid: [pts for _, pts in sorted(t.items())] for eid, t in tracks.items()}
    return per_entity, frame_of_reference


def ingest_label_inputs(in_dir: str):
    """Load and cross-check an ingest directory.

    Returns (observations, track_set, poses, intrinsics, labels).
    """
    def path(*parts):
        return os.path.join(in_dir, *parts)

    for required in ("masks", "depth"):
        if not os.path.isdir(path(required)):
            raise ConsistencyError(f"{in_dir}: missing {required}/ directory")
    for required in ("camera.txt", "tracks.csv", "labels.json", "meta.json"):
        if not os.path.exists(path(required)):
            raise ConsistencyError(f"{in_dir}: missing {required}")

    meta = json.load(open(path("meta.json")))
    ki = meta["intrinsics"]
    intrinsics = Intrinsics(fx=ki["fx"], fy=ki["fy"], cx=ki["cx"], cy=ki["cy"],
                            width=ki["width"], height=ki["height"])
    depth_scale = meta.get("depth_scale", 0.001)
    depth_encoding = meta.get("depth_encoding", "png16")

    labels_raw = json.load(open(path("labels.json")))
    labels = {int(k): str(v) for k, v in labels_raw.items()}

    mask_files = sorted(f for f in os.listdir(path("masks")) if f.endswith(".png"))
    ext = ".pfm" if depth_encoding == "pfm" else ".png"
    depth_files = sorted(f for f in os.listdir(path("depth")) if f.endswith(ext))
    if len(mask_files) != len(depth_files):
        raise ConsistencyError(
            f"masks/ has {len(mask_files)} frames but depth/ has {len(depth_files)}"
        )
    rt = parse_camera_txt(path("camera.txt"))
    if rt.shape[0] != len(mask_files):
        raise ConsistencyError(
            f"camera.txt has {rt.shape[0]} rows but masks/ has {len(mask_files)} frames"
        )
    poses = [rt_row_to_pose(row) for row in rt]

    observations: list[FrameObservation] = []
    for f, (mf, df) in enumerate(zip(mask_files, depth_files)):
        ids = decode_idmap_png(open(path("masks", mf), "rb").read())
        if depth_encoding == "pfm":
            depth = read_pfm(open(path("depth", df), "rb").read())
        else:
            depth = decode_depth_png16(open(path("depth", df), "rb").read(), depth_scale)
        if ids.shape != depth.shape:
            raise ConsistencyError(
                f"frame {f}: mask raster {ids.shape} does not match depth raster {depth.shape}"
            )
        masks = {eid: ids == eid for eid in labels if np.any(ids == eid)}
        observations.append(FrameObservation(frame=f, masks=masks, depth=depth))

    per_entity, frame_of_reference = _read_tracks_csv(path("tracks.csv"))

    anchors: dict[int, int] = {}
    for eid in labels:
        masks_seq = [o.masks.get(eid, np.zeros_like(o.depth, dtype=bool)) for o in observations]
        try:
            anchor = select_optimal_frame(masks_seq)
        except ValueError:
            continue  # never visible: label_clip will drop it with a report
        anchors[eid] = anchor
        entity_tracks = per_entity.get(eid, [])
        if not entity_tracks or not any(anchor in t for t in entity_tracks):
            raise ConsistencyError(
                f"tracks.csv: entity {eid} has no track observed at its anchor frame {anchor}"
            )

    track_set = TrackSet(tracks=per_entity, anchor_frames=anchors,
                         frame_of_reference=frame_of_reference)
    return observations, track_set, poses, intrinsics, labels


def write_label_inputs(
    out_dir: str,
    id_maps: list[np.ndarray],
    depths: list[np.ndarray],
    poses: list[Pose],
    tracks: dict[int, list[dict[int, np.ndarray]]],
    labels: dict[int, str],
    intrinsics: Intrinsics,
    depth_scale: float = 0.001,
    depth_encoding: str = "pfm",
    frame_of_reference: str = "world",
    fps: float = 15.0,
):
    """Write a complete ingest directory (used by the synthetic generator)."""
    os.makedirs(os.path.join(out_dir, "masks"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "depth"), exist_ok=True)
    for f, (ids, depth) in enumerate(zip(id_maps, depths)):
        with open(os.path.join(out_dir, "masks", f"{f:05d}.png"), "wb") as fh:
            fh.write(encode_idmap_png(ids))
        if depth_encoding == "pfm":
            payload = write_pfm(depth)
            name = f"{f:05d}.pfm"
        else:
            payload = encode_depth_png16(depth, depth_scale)
            name = f"{f:05d}.png"
        with open(os.path.join(out_dir, "depth", name), "wb") as fh:
            fh.write(payload)

    rt = np.stack([pose_to_rt_row(p) for p in poses])
    atomic_write_text(os.path.join(out_dir, "camera.txt"), format_camera_txt(rt))

    lines = [f"# frame_of_reference: {frame_of_reference}",
             "entity_id,track_id,frame,x,y,z"]
    for eid in sorted(tracks):
        for tid, pts in enumerate(tracks[eid]):
            for frame in sorted(pts):
                x, y, z = pts[frame]
                lines.append(f"{eid},{tid},{frame},{x:.17g},{y:.17g},{z:.17g}")
    atomic_write_text(os.path.join(out_dir, "tracks.csv"), "\n".join(lines) + "\n")

    atomic_write_text(os.path.join(out_dir, "labels.json"),
                      json.dumps({str(k): v for k, v in labels.items()}, indent=2) + "\n")
    meta = {
        "fps": fps,
        "frame_count": len(id_maps),
        "intrinsics": {"fx": intrinsics.fx, "fy": intrinsics.fy, "cx": intrinsics.cx,
                       "cy": intrinsics.cy, "width": intrinsics.width,
                       "height": intrinsics.height},
        "depth_encoding": depth_encoding,
        "depth_scale": depth_scale,
    }
    atomic_write_text(os.path.join(out_dir, "meta.json"), json.dumps(meta, indent=2) + "\n")
