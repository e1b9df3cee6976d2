"""FastAPI application: scene CRUD with If-Match optimistic concurrency,
keyframe edits, depth/ID previews, camera export, and bundle export."""

from __future__ import annotations

import logging

from fastapi import FastAPI, Header, HTTPException, Response

from ..formats.camera_txt import format_camera_txt
from ..formats.rasters import encode_depth_png16, encode_idmap_png
from ..formats.scene_json import ParseError, scene_from_dict, scene_to_dict
from ..geometry import Box3, Pose, Rot3
from ..render import RenderSettings, render_frame
from ..scene import (
    CAMERA_TARGET,
    FrameOutOfRange,
    LastKeyframeRemoval,
    UnknownEntity,
    export_camera_rt,
    remove_keyframe,
    resolve,
    set_keyframe,
    validate,
)
from .models import (
    BoxKeyframeModel,
    CameraKeyframeModel,
    ExportBundleRequest,
    ExportBundleResponse,
    KeyframeRequest,
    SceneDocumentModel,
    SceneRef,
    SceneResponse,
    ValidateResponse,
    ViolationModel,
)
from .store import RevisionConflict, SceneStore, UnknownScene

logger = logging.getLogger(__name__)

PREVIEW_DEPTH_SCALE = 0.001


def _parse_document(model: SceneDocumentModel):
    try:
        return scene_from_dict(model.model_dump())
    except ParseError as e:
        raise HTTPException(status_code=422, detail=str(e)) from e
    except ValueError as e:
        raise HTTPException(status_code=422, detail=str(e)) from e


def _reject_invalid(scene):
    violations = validate(scene)
    errors = [v for v in violations if v.severity == "error"]
    if errors:
        raise HTTPException(
            status_code=422,
            detail=[ViolationModel(**v.__dict__).model_dump() for v in errors],
        )


def create_app(data_dir: str = "./scenes") -> FastAPI:
    app = FastAPI(title="cineforge scene service")
    store = SceneStore(data_dir)
    app.state.store = store

    def get_session(scene_id: str):
        try:
            return store.get(scene_id)
        except UnknownScene:
            raise HTTPException(status_code=404, detail=f"unknown scene {scene_id}")

    def run_mutation(scene_id: str, if_match: int | None, fn):
        if if_match is None:
            raise HTTPException(status_code=400, detail="If-Match header required")
        get_session(scene_id)
        try:
            return store.mutate(scene_id, if_match, fn)
        except RevisionConflict as e:
            raise HTTPException(status_code=409, detail=str(e))
        except UnknownScene:
            raise HTTPException(status_code=404, detail=f"unknown scene {scene_id}")

    def parse_if_match(value: str | None) -> int | None:
        if value is None:
            return None
        try:
            return int(value.strip().strip('"'))
        except ValueError:
            raise HTTPException(status_code=400, detail=f"bad If-Match value {value!r}")

    @app.post("/scenes", response_model=SceneRef, status_code=201)
    def create_scene(document: SceneDocumentModel):
        doc = _parse_document(document)
        _reject_invalid(doc.scene)
        session = store.create(doc)
        return SceneRef(id=session.scene_id, revision=session.revision)

    @app.get("/scenes/{scene_id}", response_model=SceneResponse)
    def get_scene(scene_id: str):
        session = get_session(scene_id)
        return SceneResponse(
            id=session.scene_id,
            revision=session.revision,
            document=scene_to_dict(session.scene, session.extras),
        )

    @app.put("/scenes/{scene_id}", response_model=SceneRef)
    def replace_scene(
        scene_id: str,
        document: SceneDocumentModel,
        if_match: str | None = Header(default=None, alias="If-Match"),
    ):
        doc = _parse_document(document)
        _reject_invalid(doc.scene)
        session = run_mutation(
            scene_id, parse_if_match(if_match), lambda _: (doc.scene, doc.extras)
        )
        return SceneRef(id=session.scene_id, revision=session.revision)

    @app.post("/scenes/{scene_id}/keyframes", response_model=SceneRef)
    def edit_keyframe(
        scene_id: str,
        req: KeyframeRequest,
        if_match: str | None = Header(default=None, alias="If-Match"),
    ):
        if req.target == CAMERA_TARGET:
            target = CAMERA_TARGET
            value = None
            if req.value is not None:
                if not isinstance(req.value, CameraKeyframeModel):
                    raise HTTPException(status_code=422,
                                        detail="camera keyframe needs quaternion + translation")
                value = Pose(rotation=Rot3.from_quat(req.value.quaternion),
                             translation=req.value.translation)
        else:
            try:
                target = int(req.target)
            except (TypeError, ValueError):
                raise HTTPException(status_code=422, detail=f"bad target {req.target!r}")
            value = None
            if req.value is not None:
                if not isinstance(req.value, BoxKeyframeModel):
                    raise HTTPException(status_code=422,
                                        detail="box keyframe needs center/half_extents/rotation")
                try:
                    value = Box3(center=req.value.center,
                                 half_extents=req.value.half_extents,
                                 rotation=Rot3.from_quat(req.value.rotation))
                except ValueError as e:
                    raise HTTPException(status_code=422, detail=str(e))

        def apply(scene):
            try:
                if value is None:
                    return remove_keyframe(scene, target, req.frame), None
                return set_keyframe(scene, target, req.frame, value), None
            except (FrameOutOfRange, LastKeyframeRemoval) as e:
                raise HTTPException(status_code=422, detail=str(e))
            except UnknownEntity as e:
                raise HTTPException(status_code=422, detail=f"unknown entity {e.args[0]}")

        session = run_mutation(scene_id, parse_if_match(if_match), apply)
        return SceneRef(id=session.scene_id, revision=session.revision)

    @app.get("/scenes/{scene_id}/preview/{frame}")
    def preview(
        scene_id: str,
        frame: int,
        kind: str = "depth",
        width: int | None = None,
        height: int | None = None,
    ):
        if kind not in ("depth", "id"):
            raise HTTPException(status_code=400, detail=f"kind must be depth|id, got {kind!r}")
        session = get_session(scene_id)
        if not (0 <= frame < session.scene.frame_count):
            raise HTTPException(
                status_code=400,
                detail=f"frame {frame} outside [0, {session.scene.frame_count})",
            )
        key = (session.scene_id, session.revision, frame, kind, width, height)

        def render() -> bytes:
            sample = resolve(session.scene, frame)
            settings = RenderSettings(width=width, height=height)
            depth, ids = render_frame(sample, session.scene.camera.intrinsics, settings)
            if kind == "depth":
                return encode_depth_png16(depth, PREVIEW_DEPTH_SCALE)
            return encode_idmap_png(ids)

        data = store.preview_cached(key, render)
        return Response(
            content=data,
            media_type="image/png",
            headers={"X-Scene-Revision": str(session.revision),
                     "ETag": f'"{session.revision}"'},
        )

    @app.get("/scenes/{scene_id}/camera.txt")
    def camera_txt(scene_id: str):
        session = get_session(scene_id)
        return Response(
            content=format_camera_txt(export_camera_rt(session.scene)),
            media_type="text/plain",
            headers={"X-Scene-Revision": str(session.revision)},
        )

    @app.post("/scenes/{scene_id}/validate", response_model=ValidateResponse)
    def validate_scene(scene_id: str):
        session = get_session(scene_id)
        return ValidateResponse(
            violations=[ViolationModel(**v.__dict__) for v in validate(session.scene)]
        )

    @app.post("/scenes/{scene_id}/export-bundle", response_model=ExportBundleResponse)
    def export_bundle(scene_id: str, req: ExportBundleRequest):
        from ..formats.bundle import export_condition_bundle

        session = get_session(scene_id)
        settings = RenderSettings(width=req.width, height=req.height,
                                  near=req.near, far=req.far)
        meta = export_condition_bundle(
            session.scene, req.out_dir, settings,
            depth_scale=req.depth_scale, depth_encoding=req.depth_encoding,
        )
        return ExportBundleResponse(id=session.scene_id, revision=session.revision, meta=meta)

    return app
