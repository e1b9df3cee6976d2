"""Pydantic request/response models for the scene service.

The scene document model mirrors the on-disk JSON schema; unknown fields are
allowed and preserved so future documents survive a read-modify-write.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class BoxKeyframeModel(BaseModel):
    center: list[float] = Field(min_length=3, max_length=3)
    half_extents: list[float] = Field(min_length=3, max_length=3)
    rotation: list[float] = Field(min_length=4, max_length=4)  # w, x, y, z


class EntityModel(BaseModel):
    id: int
    label: str
    keyframes: dict[str, BoxKeyframeModel]


class IntrinsicsModel(BaseModel):
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int


class CameraKeyframeModel(BaseModel):
    quaternion: list[float] = Field(min_length=4, max_length=4)
    translation: list[float] = Field(min_length=3, max_length=3)


class CameraModel(BaseModel):
    intrinsics: IntrinsicsModel
    keyframes: dict[str, CameraKeyframeModel]


class SceneDocumentModel(BaseModel):
    model_config = ConfigDict(extra="allow")

    schema_version: int = 1
    fps: float
    frame_count: int
    entities: list[EntityModel]
    camera: CameraModel


class SceneRef(BaseModel):
    id: str
    revision: int


class SceneResponse(SceneRef):
    document: dict


class KeyframeRequest(BaseModel):
    """Set (value present) or remove (value absent) one keyframe."""

    target: int | str  # entity id or "camera"
    frame: int
    value: BoxKeyframeModel | CameraKeyframeModel | None = None


class ViolationModel(BaseModel):
    code: str
    message: str
    entity_id: int | None = None
    frame: int | None = None
    severity: str = "error"


class ValidateResponse(BaseModel):
    violations: list[ViolationModel]


class ExportBundleRequest(BaseModel):
    out_dir: str
    width: int | None = None
    height: int | None = None
    near: float = 0.05
    far: float = 1000.0
    depth_scale: float = 0.001
    depth_encoding: str = "png16"


class ExportBundleResponse(SceneRef):
    meta: dict
