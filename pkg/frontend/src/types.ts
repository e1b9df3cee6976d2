/** Scene document shapes, mirroring the service's JSON schema (version 1). */

export type Quat = [number, number, number, number]; // w, x, y, z
export type Vec3 = [number, number, number];

export interface BoxKeyframe {
  center: Vec3;
  half_extents: Vec3;
  rotation: Quat;
}

export interface EntityDoc {
  id: number;
  label: string;
  keyframes: Record<string, BoxKeyframe>;
}

export interface CameraKeyframe {
  quaternion: Quat;
  translation: Vec3;
}

export interface IntrinsicsDoc {
  fx: number;
  fy: number;
  cx: number;
  cy: number;
  width: number;
  height: number;
}

export interface CameraDoc {
  intrinsics: IntrinsicsDoc;
  keyframes: Record<string, CameraKeyframe>;
}

export interface SceneDocument {
  schema_version: number;
  fps: number;
  frame_count: number;
  entities: EntityDoc[];
  camera: CameraDoc;
  [extra: string]: unknown; // unknown fields are preserved by the service
}

export interface SceneRef {
  id: string;
  revision: number;
}

export interface SceneResponse extends SceneRef {
  document: SceneDocument;
}

export interface Violation {
  code: string;
  message: string;
  entity_id: number | null;
  frame: number | null;
  severity: string;
}

/** A keyframe edit target: an entity id, or the camera. */
export type Target = number | "camera";

export interface KeyframeRequest {
  target: Target;
  frame: number;
  value: BoxKeyframe | CameraKeyframe | null; // null removes the keyframe
}
