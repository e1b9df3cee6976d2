"""Versioned scene JSON documents with lossless round-trip.

Reals are emitted via repr (17 significant digits), so serialize-parse is
an identity on float64 values. Unknown fields found in a document are kept
and written back verbatim on save.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

from ..geometry import Box3, Intrinsics, Pose, Rot3
from ..scene import CameraTrack, Entity, Scene

SCHEMA_VERSION = 1

_KNOWN_TOP = {"schema_version", "fps", "frame_count", "entities", "camera"}


class SchemaVersionUnsupported(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, path: str | None = None, offset: int | None = None):
        self.path = path
        self.offset = offset
        where = f" in {path}" if path else ""
        at = f" at byte {offset}" if offset is not None else ""
        super().__init__(f"{message}{where}{at}")


@dataclass
class SceneDocument:
    scene: Scene
    extras: dict = field(default_factory=dict)  # unknown top-level fields


def scene_to_dict(scene: Scene, extras: dict | None = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "fps": scene.fps,
        "frame_count": scene.frame_count,
        "entities": [
            {
                "id": e.id,
                "label": e.label,
                "keyframes": {
                    str(f): {
                        "center": list(b.center),
                        "half_extents": list(b.half_extents),
                        "rotation": list(b.rotation.as_quat()),
                    }
                    for f, b in sorted(e.keyframes.items())
                },
            }
            for e in scene.entities
        ],
        "camera": {
            "intrinsics": {
                "fx": scene.camera.intrinsics.fx,
                "fy": scene.camera.intrinsics.fy,
                "cx": scene.camera.intrinsics.cx,
                "cy": scene.camera.intrinsics.cy,
                "width": scene.camera.intrinsics.width,
                "height": scene.camera.intrinsics.height,
            },
            "keyframes": {
                str(f): {
                    "quaternion": list(p.rotation.as_quat()),
                    "translation": list(p.translation),
                }
                for f, p in sorted(scene.camera.keyframes.items())
            },
        },
    }
    if extras:
        for key, value in extras.items():
            if key not in _KNOWN_TOP:
                doc[key] = value
    return doc


def _require(d: dict, key: str, ctx: str):
    if key not in d:
        raise ParseError(f"missing field '{key}' in {ctx}")
    return d[key]


def scene_from_dict(doc: dict) -> SceneDocument:
    version = _require(doc, "schema_version", "document")
    if version != SCHEMA_VERSION:
        raise SchemaVersionUnsupported(f"schema_version {version} not supported")
    try:
        entities = []
        for ed in _require(doc, "entities", "document"):
            keyframes = {
                int(f): Box3(
                    center=kf["center"],
                    half_extents=kf["half_extents"],
                    rotation=Rot3.from_quat(kf["rotation"]),
                )
                for f, kf in _require(ed, "keyframes", f"entity {ed.get('id')}").items()
            }
            entities.append(Entity(id=ed["id"], label=ed["label"], keyframes=keyframes))
        cam = _require(doc, "camera", "document")
        ki = _require(cam, "intrinsics", "camera")
        intrinsics = Intrinsics(
            fx=ki["fx"], fy=ki["fy"], cx=ki["cx"], cy=ki["cy"],
            width=ki["width"], height=ki["height"],
        )
        cam_keys = {
            int(f): Pose(rotation=Rot3.from_quat(kf["quaternion"]), translation=kf["translation"])
            for f, kf in _require(cam, "keyframes", "camera").items()
        }
        scene = Scene(
            frame_count=_require(doc, "frame_count", "document"),
            fps=_require(doc, "fps", "document"),
            entities=tuple(entities),
            camera=CameraTrack(keyframes=cam_keys, intrinsics=intrinsics),
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed scene document: {e}") from e
    extras = {k: v for k, v in doc.items() if k not in _KNOWN_TOP}
    return SceneDocument(scene=scene, extras=extras)


def atomic_write_text(path: str, text: str):
    """Write via temp file + rename so readers never see a partial file."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_scene(path: str, scene: Scene, extras: dict | None = None):
    atomic_write_text(path, json.dumps(scene_to_dict(scene, extras), indent=2) + "\n")


def load_scene(path: str) -> SceneDocument:
    with open(path, "r") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", path=path, offset=e.pos) from e
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object", path=path)
    try:
        return scene_from_dict(doc)
    except ParseError as e:
        raise ParseError(str(e), path=path) from e
