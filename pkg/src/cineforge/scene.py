"""Authored scenes: labeled entities with keyframed box tracks plus a
keyframed camera. Scenes are immutable values; edits return updated copies."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import Box3, Intrinsics, Pose, Rot3

CAMERA_TARGET = "camera"


class FrameOutOfRange(ValueError):
    pass


class LastKeyframeRemoval(ValueError):
    pass


class UnknownEntity(KeyError):
    pass


@dataclass(frozen=True)
class Entity:
    id: int
    label: str
    keyframes: dict[int, Box3]  # frame index -> box

    def __post_init__(self):
        if self.id <= 0:
            raise ValueError("entity id must be > 0 (0 is the background)")
        if not self.label:
            raise ValueError("entity label must be non-empty")


@dataclass(frozen=True)
class CameraTrack:
    keyframes: dict[int, Pose]
    intrinsics: Intrinsics


@dataclass(frozen=True)
class SceneSample:
    frame: int
    boxes: dict[int, Box3]
    camera_pose: Pose


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    entity_id: int | None = None
    frame: int | None = None
    severity: str = "error"  # "error" | "warning"


@dataclass(frozen=True)
class Scene:
    frame_count: int
    fps: float
    entities: tuple[Entity, ...]
    camera: CameraTrack

    def entity(self, entity_id: int) -> Entity:
        for e in self.entities:
            if e.id == entity_id:
                return e
        raise UnknownEntity(entity_id)


def _check_frame(scene: Scene, frame: int):
    if not (0 <= frame < scene.frame_count):
        raise FrameOutOfRange(f"frame {frame} outside [0, {scene.frame_count})")


def set_keyframe(scene: Scene, target, frame: int, value) -> Scene:
    """Set (or overwrite) one keyframe. target is an entity id or CAMERA_TARGET."""
    _check_frame(scene, frame)
    if target == CAMERA_TARGET:
        keys = dict(scene.camera.keyframes)
        keys[frame] = value
        return replace(scene, camera=replace(scene.camera, keyframes=keys))
    ent = scene.entity(target)
    keys = dict(ent.keyframes)
    keys[frame] = value
    new_entities = tuple(
        replace(e, keyframes=keys) if e.id == target else e for e in scene.entities
    )
    return replace(scene, entities=new_entities)


def remove_keyframe(scene: Scene, target, frame: int) -> Scene:
    _check_frame(scene, frame)
    if target == CAMERA_TARGET:
        keys = dict(scene.camera.keyframes)
        if frame not in keys:
            raise FrameOutOfRange(f"no camera keyframe at frame {frame}")
        if len(keys) == 1:
            raise LastKeyframeRemoval("camera track must keep at least one keyframe")
        del keys[frame]
        return replace(scene, camera=replace(scene.camera, keyframes=keys))
    ent = scene.entity(target)
    keys = dict(ent.keyframes)
    if frame not in keys:
        raise FrameOutOfRange(f"entity {target} has no keyframe at frame {frame}")
    if len(keys) == 1:
        raise LastKeyframeRemoval(f"entity {target} must keep at least one keyframe")
    del keys[frame]
    new_entities = tuple(
        replace(e, keyframes=keys) if e.id == target else e for e in scene.entities
    )
    return replace(scene, entities=new_entities)


def _bracket(frames: list[int], f: int) -> tuple[int, int, float]:
    """Neighboring keyframes and blend factor; clamps outside the key range."""
    if f <= frames[0]:
        return frames[0], frames[0], 0.0
    if f >= frames[-1]:
        return frames[-1], frames[-1], 0.0
    hi = bisect_right(frames, f)
    f0, f1 = frames[hi - 1], frames[hi]
    return f0, f1, (f - f0) / (f1 - f0)


def _interp_box(keys: dict[int, Box3], frame: int) -> Box3:
    frames = sorted(keys)
    f0, f1, t = _bracket(frames, frame)
    if f0 == f1 or t == 0.0:
        return keys[f0]
    a, b = keys[f0], keys[f1]
    return Box3(
        center=(1 - t) * a.center + t * b.center,
        half_extents=(1 - t) * a.half_extents + t * b.half_extents,
        rotation=a.rotation.slerp(b.rotation, t),
    )


def _interp_pose(keys: dict[int, Pose], frame: int) -> Pose:
    frames = sorted(keys)
    f0, f1, t = _bracket(frames, frame)
    if f0 == f1 or t == 0.0:
        return keys[f0]
    a, b = keys[f0], keys[f1]
    return Pose(
        rotation=a.rotation.slerp(b.rotation, t),
        translation=(1 - t) * a.translation + t * b.translation,
    )


def resolve(scene: Scene, frame: int) -> SceneSample:
    """Per-frame values: exact at keyframes, lerp/slerp between, clamped outside."""
    _check_frame(scene, frame)
    boxes = {e.id: _interp_box(e.keyframes, frame) for e in scene.entities}
    pose = _interp_pose(scene.camera.keyframes, frame)
    return SceneSample(frame=frame, boxes=boxes, camera_pose=pose)


def export_camera_rt(scene: Scene) -> np.ndarray:
    """(F, 12) array: per frame, row-major 3x3 rotation then translation."""
    rows = np.empty((scene.frame_count, 12), dtype=np.float64)
    for f in range(scene.frame_count):
        pose = _interp_pose(scene.camera.keyframes, f)
        rows[f, :9] = pose.rotation.matrix().reshape(-1)
        rows[f, 9:] = pose.translation
    return rows


def validate(scene: Scene) -> list[Violation]:
    """Structural checks; empty list means the scene is well-formed.

    Volume changing across an entity's keyframes is legal in authored
    scenes but reported as a warning (labeled data keeps volume constant).
    """
    out: list[Violation] = []
    if scene.frame_count <= 0:
        out.append(Violation("BadFrameCount", f"frame_count = {scene.frame_count}"))
        return out
    if scene.fps <= 0:
        out.append(Violation("BadFps", f"fps = {scene.fps}"))

    seen: set[int] = set()
    for e in scene.entities:
        if e.id in seen:
            out.append(Violation("DuplicateId", f"duplicate entity id {e.id}", entity_id=e.id))
        seen.add(e.id)
        if not e.keyframes:
            out.append(Violation("EmptyTrack", f"entity {e.id} has no keyframes", entity_id=e.id))
            continue
        for f in e.keyframes:
            if not (0 <= f < scene.frame_count):
                out.append(
                    Violation(
                        "FrameOutOfRange",
                        f"entity {e.id} keyframe {f} outside [0, {scene.frame_count})",
                        entity_id=e.id,
                        frame=f,
                    )
                )
        volumes = [b.volume for b in e.keyframes.values()]
        if max(volumes) - min(volumes) > 1e-9 * max(volumes):
            out.append(
                Violation(
                    "VolumeVaries",
                    f"entity {e.id} box volume changes across keyframes",
                    entity_id=e.id,
                    severity="warning",
                )
            )

    if not scene.camera.keyframes:
        out.append(Violation("EmptyTrack", "camera has no keyframes"))
    for f in scene.camera.keyframes:
        if not (0 <= f < scene.frame_count):
            out.append(
                Violation(
                    "FrameOutOfRange",
                    f"camera keyframe {f} outside [0, {scene.frame_count})",
                    frame=f,
                )
            )
    return out
