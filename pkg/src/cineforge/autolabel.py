"""Auto-labeling geometry: reconstruct per-entity 3D box tracks from
externally produced masks, metric depth, camera poses, and 3D point tracks.

Per entity: pick the anchor frame where its mask is largest, lift the masked
depth pixels to a world-space point cloud, fit a minimum-volume oriented box,
then translate that box to every other frame by the mean displacement of its
tracked points. Size and orientation stay fixed; frames without co-observed
track points are flagged and later filled by scene interpolation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .geometry import Box3, Intrinsics, Pose, invert, unproject
from .metrics import Box2, iou
from .obb import ObbFitReport, fit_min_volume_obb
from .scene import CameraTrack, Entity, Scene

logger = logging.getLogger(__name__)


class EntityNeverVisible(ValueError):
    pass


class EmptyCloud(ValueError):
    pass


@dataclass(frozen=True)
class Detection2D:
    label: str
    box: Box2
    score: float | None = None  # optional precomputed similarity in [0, 1]


@dataclass(frozen=True)
class FrameObservation:
    """External per-frame inputs: entity masks + estimator metric depth.
    Depth 0 means invalid (estimator hole), not background."""

    frame: int
    masks: dict[int, np.ndarray]  # entity id -> bool/uint8 raster
    depth: np.ndarray

    def __post_init__(self):
        for eid, m in self.masks.items():
            if m.shape != self.depth.shape:
                raise ValueError(
                    f"frame {self.frame}: mask of entity {eid} is {m.shape}, "
                    f"depth is {self.depth.shape}"
                )


@dataclass(frozen=True)
class TrackSet:
    """3D point tracks per entity: each track maps frame -> xyz."""

    tracks: dict[int, list[dict[int, np.ndarray]]]  # entity id -> tracks
    anchor_frames: dict[int, int] = field(default_factory=dict)
    frame_of_reference: str = "world"  # "world" | "camera"


@dataclass
class EntityLabelReport:
    entity_id: int
    anchor_frame: int
    fit: ObbFitReport
    missing_frames: list[int]
    point_count: int


@dataclass
class LabelResult:
    scene: Scene
    entity_reports: list[EntityLabelReport]
    dropped: dict[int, str]  # entity id -> reason


def filter_overlapping_boxes(
    dets: list[Detection2D], iou_threshold: float, score_floor: float = 0.0
) -> list[Detection2D]:
    """Greedy IoU suppression in descending score order (missing score = 1.0,
    ties keep input order). Detections below score_floor are dropped."""
    if not (0.0 <= iou_threshold <= 1.0):
        raise ValueError(f"iou_threshold {iou_threshold} outside [0, 1]")
    scored = [
        (d.score if d.score is not None else 1.0, i, d) for i, d in enumerate(dets)
    ]
    scored = [s for s in scored if s[0] >= score_floor]
    scored.sort(key=lambda s: (-s[0], s[1]))
    kept: list[Detection2D] = []
    for _, _, d in scored:
        if all(iou(d.box, k.box) < iou_threshold for k in kept):
            kept.append(d)
    return kept


def select_optimal_frame(masks: list[np.ndarray]) -> int:
    """Frame where the entity's mask is largest; ties break to the lowest
    index. Raises EntityNeverVisible when every mask is empty."""
    areas = [int(np.count_nonzero(m)) for m in masks]
    best = int(np.argmax(areas))
    if areas[best] == 0:
        raise EntityNeverVisible("mask is empty in every frame")
    return best


def entity_point_cloud(
    mask: np.ndarray,
    depth: np.ndarray,
    pose: Pose,
    k: Intrinsics,
    mad_threshold: float | None = 3.0,
) -> np.ndarray:
    """Lift masked pixels with valid depth to world space (one point per
    pixel, sampled at pixel centers).

    mad_threshold: when set, pixels whose depth deviates more than this many
    MADs from the masked median are discarded (depth-estimator bleed at mask
    borders otherwise inflates the box fit). The deviation scale is floored
    at 5% of the median depth so that a mostly fronto-parallel object does
    not lose its own far faces: real bleed sits at background depth, far
    outside that window, while legitimate intra-object spread stays inside.
    """
    if mask.shape != depth.shape:
        raise ValueError(f"mask {mask.shape} and depth {depth.shape} sizes differ")
    sel = (mask != 0) & (depth > 0)
    if not np.any(sel):
        raise EmptyCloud("no masked pixel has valid depth")
    vs, us = np.nonzero(sel)
    ds = depth[sel]

    if mad_threshold is not None and ds.size > 2:
        med = np.median(ds)
        mad = np.median(np.abs(ds - med))
        scale = max(mad, 0.05 * med)
        keep = np.abs(ds - med) <= mad_threshold * scale
        us, vs, ds = us[keep], vs[keep], ds[keep]

    x = (us + 0.5 - k.cx) / k.fx * ds
    y = (vs + 0.5 - k.cy) / k.fy * ds
    cam_pts = np.stack([x, y, ds], axis=1)
    c2w = invert(pose)
    return cam_pts @ c2w.rotation.matrix().T + c2w.translation


def propagate_boxes(
    anchor_box: Box3,
    anchor_frame: int,
    tracks: list[dict[int, np.ndarray]],
    frame_count: int,
) -> tuple[dict[int, Box3], list[int]]:
    """Translate the anchor box to every frame by the mean world-space
    displacement of points observed at both that frame and the anchor.

    Returns (frame -> box, missing frames with zero co-observed points).
    Half-extents and rotation never change.
    """
    anchored = [t for t in tracks if anchor_frame in t]
    if not anchored:
        raise ValueError(f"no track observed at anchor frame {anchor_frame}")
    boxes: dict[int, Box3] = {anchor_frame: anchor_box}
    missing: list[int] = []
    for f in range(frame_count):
        if f == anchor_frame:
            continue
        disp = [
            np.asarray(t[f], dtype=np.float64) - np.asarray(t[anchor_frame], dtype=np.float64)
            for t in anchored
            if f in t
        ]
        if not disp:
            missing.append(f)
            continue
        boxes[f] = anchor_box.translated(np.mean(disp, axis=0))
    return boxes, missing


def _world_tracks(ts: TrackSet, entity_id: int, poses: list[Pose]) -> list[dict[int, np.ndarray]]:
    tracks = ts.tracks.get(entity_id, [])
    if ts.frame_of_reference == "world":
        return tracks
    out = []
    for t in tracks:
        out.append(
            {f: invert(poses[f]).apply(np.asarray(p, dtype=np.float64)) for f, p in t.items()}
        )
    return out


def label_clip(
    obs: list[FrameObservation],
    tracks: TrackSet,
    poses: list[Pose],
    k: Intrinsics,
    labels: dict[int, str],
    fps: float = 15.0,
    mad_threshold: float | None = 3.0,
    up_axis: np.ndarray | None = None,
) -> LabelResult:
    """Full per-clip reconstruction; entities that never become visible or
    yield an empty cloud are dropped with a report entry, not a failure."""
    frame_count = len(obs)
    if len(poses) != frame_count:
        raise ValueError(f"{len(poses)} poses for {frame_count} frames")
    obs = sorted(obs, key=lambda o: o.frame)

    entities: list[Entity] = []
    reports: list[EntityLabelReport] = []
    dropped: dict[int, str] = {}

    for eid in sorted(labels):
        masks = [o.masks.get(eid, np.zeros_like(o.depth, dtype=bool)) for o in obs]
        try:
            anchor = select_optimal_frame(masks)
            cloud = entity_point_cloud(
                masks[anchor], obs[anchor].depth, poses[anchor], k, mad_threshold
            )
        except (EntityNeverVisible, EmptyCloud) as e:
            logger.warning("entity %d dropped: %s", eid, e)
            dropped[eid] = str(e)
            continue

        box, fit = fit_min_volume_obb(cloud, up_axis=up_axis)
        world = _world_tracks(tracks, eid, poses)
        world = [t for t in world if anchor in t]
        if not world:
            dropped[eid] = f"no track observed at anchor frame {anchor}"
            logger.warning("entity %d dropped: %s", eid, dropped[eid])
            continue
        boxes, missing = propagate_boxes(box, anchor, world, frame_count)
        entities.append(Entity(id=eid, label=labels[eid], keyframes=boxes))
        reports.append(
            EntityLabelReport(
                entity_id=eid,
                anchor_frame=anchor,
                fit=fit,
                missing_frames=missing,
                point_count=len(cloud),
            )
        )

    camera = CameraTrack(keyframes={f: poses[f] for f in range(frame_count)}, intrinsics=k)
    scene = Scene(frame_count=frame_count, fps=fps, entities=tuple(entities), camera=camera)
    return LabelResult(scene=scene, entity_reports=reports, dropped=dropped)
