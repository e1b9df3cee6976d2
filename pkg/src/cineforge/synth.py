"""Synthetic ground-truth clips: a random authored scene plus the ingest
directory an external perception stack would have produced for it (masks =
per-entity ID maps, depth = rendered depth, tracks = box-interior points).
Used for end-to-end recovery tests and by the `synth` CLI subcommand."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Box3, Intrinsics, Pose, Rot3, invert, vec3
from .render import RenderSettings, render_sequence
from .scene import CameraTrack, Entity, Scene, resolve


@dataclass
class SyntheticClip:
    scene: Scene
    id_maps: list[np.ndarray]
    depths: list[np.ndarray]
    poses: list[Pose]
    tracks: dict[int, list[dict[int, np.ndarray]]]
    labels: dict[int, str]
    settings: RenderSettings


_LABELS = ("car", "person", "dog", "chair", "balloon", "robot", "crate", "lamp")


def _look_at(eye: np.ndarray, target: np.ndarray) -> Pose:
    """World-to-camera pose for a camera at eye looking at target, +y down."""
    fwd = target - eye
    fwd = fwd / np.linalg.norm(fwd)
    world_down = vec3(0.0, 1.0, 0.0)  # world +y is down, matching the camera frame
    right = np.cross(world_down, fwd)
    if np.linalg.norm(right) < 1e-6:
        right = vec3(1.0, 0.0, 0.0)
    right = right / np.linalg.norm(right)
    down = np.cross(fwd, right)
    R_c2w = np.stack([right, down, fwd], axis=1)  # columns = camera axes in world
    rot = Rot3.from_matrix(R_c2w.T)
    return Pose(rotation=rot, translation=-(R_c2w.T @ eye))


def _entity_fully_visible(clip: "SyntheticClip") -> bool:
    """Every entity must have a frame where its mask equals its solo
    (occlusion-free) silhouette and stays off the image border, so the
    anchor-frame point cloud spans the whole box."""
    from .render import render_frame

    k = clip.scene.camera.intrinsics
    for eid in clip.labels:
        areas = [int((ids == eid).sum()) for ids in clip.id_maps]
        anchor = int(np.argmax(areas))
        if areas[anchor] == 0:
            return False
        sample = resolve(clip.scene, anchor)
        solo = SceneSampleSolo(sample, eid)
        _, solo_ids = render_frame(solo, k, clip.settings)
        mask = clip.id_maps[anchor] == eid
        if (solo_ids == eid).sum() != mask.sum():
            return False
        vs, us = np.nonzero(mask)
        if vs.min() == 0 or us.min() == 0 or vs.max() == mask.shape[0] - 1 \
                or us.max() == mask.shape[1] - 1:
            return False
    return True


def SceneSampleSolo(sample, eid):
    from .scene import SceneSample

    return SceneSample(frame=sample.frame, boxes={eid: sample.boxes[eid]},
                       camera_pose=sample.camera_pose)


def generate_clip(
    seed: int,
    frame_count: int = 16,
    max_entities: int = 3,
    width: int = 320,
    height: int = 320,
    points_per_entity: int = 12,
    max_attempts: int = 40,
) -> SyntheticClip:
    """Random scene with 1..max_entities translating boxes and a moving
    camera on a slight orbit, viewed obliquely so box fitting is well posed.

    Placements are rejection-sampled until every entity is fully visible
    (unoccluded, off the image border) at its largest-mask frame.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        clip = _generate_once(rng, frame_count, max_entities, width, height,
                              points_per_entity)
        if _entity_fully_visible(clip):
            return clip
    raise RuntimeError(f"no fully visible layout found in {max_attempts} attempts")


def _generate_once(
    rng: np.random.Generator,
    frame_count: int,
    max_entities: int,
    width: int,
    height: int,
    points_per_entity: int,
) -> SyntheticClip:
    n_entities = int(rng.integers(1, max_entities + 1))
    k = Intrinsics(fx=480.0, fy=480.0, cx=width / 2.0, cy=height / 2.0,
                   width=width, height=height)

    entities = []
    tracks: dict[int, list[dict[int, np.ndarray]]] = {}
    labels: dict[int, str] = {}
    slots = rng.permutation(np.linspace(-1.1, 1.1, max(n_entities, 2)))
    for i in range(n_entities):
        eid = i + 1
        half = rng.uniform(0.25, 0.4, size=3)
        yaw = rng.uniform(0, 2 * np.pi)
        rot = Rot3.from_axis_angle(vec3(0, 1, 0), yaw)
        c0 = vec3(float(slots[i]), float(rng.uniform(-0.25, 0.25)), float(rng.uniform(-0.35, 0.35)))
        drift = rng.uniform(-0.25, 0.25, size=3)
        c1 = c0 + drift
        box0 = Box3(center=c0, half_extents=half, rotation=rot)
        box1 = Box3(center=c1, half_extents=half, rotation=rot)
        entities.append(Entity(id=eid, label=_LABELS[i % len(_LABELS)],
                               keyframes={0: box0, frame_count - 1: box1}))
        labels[eid] = entities[-1].label

        # tracked points rigidly attached inside the box
        local = rng.uniform(-0.8, 0.8, size=(points_per_entity, 3)) * half
        world0 = local @ rot.matrix().T + c0
        entity_tracks = []
        for p0 in world0:
            entity_tracks.append(
                {f: p0 + (f / (frame_count - 1)) * drift for f in range(frame_count)}
            )
        tracks[eid] = entity_tracks

    # oblique orbit: above and to the side, slowly sweeping
    angle0 = rng.uniform(0.4, 0.9) * rng.choice([-1.0, 1.0])
    sweep = rng.uniform(0.15, 0.35)
    radius = 5.0
    elevation = rng.uniform(1.8, 2.6)

    def cam_pose(angle):
        eye = vec3(radius * np.sin(angle), -elevation, -radius * np.cos(angle))
        return _look_at(eye, vec3(0.0, 0.0, 0.0))

    camera = CameraTrack(
        keyframes={0: cam_pose(angle0), frame_count - 1: cam_pose(angle0 + sweep)},
        intrinsics=k,
    )
    scene = Scene(frame_count=frame_count, fps=15.0, entities=tuple(entities), camera=camera)

    settings = RenderSettings(near=0.05, far=100.0)
    frames = render_sequence(scene, settings)
    id_maps = [ids for _, ids in frames]
    depths = [depth for depth, _ in frames]
    poses = [resolve(scene, f).camera_pose for f in range(frame_count)]
    return SyntheticClip(scene=scene, id_maps=id_maps, depths=depths, poses=poses,
                         tracks=tracks, labels=labels, settings=settings)


def write_clip(clip: SyntheticClip, out_dir: str, depth_encoding: str = "pfm"):
    """Write the clip as an ingest directory plus the ground-truth scene."""
    import os

    from .formats.ingest import write_label_inputs
    from .formats.scene_json import save_scene

    write_label_inputs(
        out_dir,
        id_maps=clip.id_maps,
        depths=clip.depths,
        poses=clip.poses,
        tracks=clip.tracks,
        labels=clip.labels,
        intrinsics=clip.scene.camera.intrinsics,
        depth_encoding=depth_encoding,
        fps=clip.scene.fps,
    )
    save_scene(os.path.join(out_dir, "ground_truth_scene.json"), clip.scene)
