"""Bit-exact persistence: scene documents, depth/ID rasters, camera
sequences, condition bundles, and label-input ingestion."""

from .bundle import export_condition_bundle, validate_bundle
from .camera_txt import (
    FieldCountError,
    NonFiniteValue,
    parse_camera_txt,
    parse_realestate10k,
    write_camera_txt,
)
from .camera_txt import format_camera_txt
from .ingest import (
    ConsistencyError,
    ingest_label_inputs,
    pose_to_rt_row,
    rt_row_to_pose,
    write_label_inputs,
)
from .rasters import (
    DepthOverflow,
    decode_depth_png16,
    decode_idmap_png,
    encode_depth_png16,
    encode_idmap_png,
    read_pfm,
    write_pfm,
)
from .scene_json import (
    ParseError,
    SceneDocument,
    SchemaVersionUnsupported,
    load_scene,
    save_scene,
    scene_from_dict,
    scene_to_dict,
)

__all__ = [
    "ConsistencyError",
    "DepthOverflow",
    "FieldCountError",
    "NonFiniteValue",
    "ParseError",
    "SceneDocument",
    "SchemaVersionUnsupported",
    "decode_depth_png16",
    "decode_idmap_png",
    "encode_depth_png16",
    "encode_idmap_png",
    "export_condition_bundle",
    "format_camera_txt",
    "ingest_label_inputs",
    "pose_to_rt_row",
    "rt_row_to_pose",
    "load_scene",
    "parse_camera_txt",
    "parse_realestate10k",
    "read_pfm",
    "save_scene",
    "scene_from_dict",
    "scene_to_dict",
    "validate_bundle",
    "write_camera_txt",
    "write_label_inputs",
    "write_pfm",
]
