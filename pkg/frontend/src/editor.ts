/** Editor session state: one scene per tab, optimistic concurrency.
 *
 * Every mutation is sent with the last revision this tab saw. When another
 * tab has moved the scene forward, the service answers 409; the editor then
 * reloads the document (adopting the newer revision) and retries the edit
 * once. Notifications surface what happened without blocking the session. */

import { ConflictError, SceneClient } from "./api.js";
import type { KeyframeRequest, SceneDocument, Target } from "./types.js";

export interface EditorNotice {
  kind: "conflict-reloaded" | "error";
  message: string;
}

export class EditorState {
  revision = -1;
  document: SceneDocument | null = null;
  selectedTarget: Target = "camera";
  activeFrame = 0;
  dirty = false;
  readonly notices: EditorNotice[] = [];

  constructor(
    private readonly client: SceneClient,
    public readonly sceneId: string
  ) {}

  async load(): Promise<void> {
    const resp = await this.client.getScene(this.sceneId);
    this.revision = resp.revision;
    this.document = resp.document;
    this.dirty = false;
  }

  select(target: Target): void {
    this.selectedTarget = target;
  }

  scrub(frame: number): void {
    if (!this.document) throw new Error("scene not loaded");
    if (frame < 0 || frame >= this.document.frame_count) {
      throw new Error(`frame ${frame} outside [0, ${this.document.frame_count})`);
    }
    this.activeFrame = frame;
  }

  /** Apply one keyframe edit with the stale-tab recovery protocol:
   * send with our revision; on 409 reload, then retry exactly once. */
  async editKeyframe(req: KeyframeRequest): Promise<void> {
    if (this.revision < 0) throw new Error("scene not loaded");
    try {
      const ref = await this.client.editKeyframe(this.sceneId, req, this.revision);
      this.revision = ref.revision;
    } catch (err) {
      if (!(err instanceof ConflictError)) throw err;
      await this.load();
      this.notices.push({
        kind: "conflict-reloaded",
        message: `scene changed in another session; reloaded at revision ${this.revision} and retried`,
      });
      const ref = await this.client.editKeyframe(this.sceneId, req, this.revision);
      this.revision = ref.revision;
    }
    await this.load(); // pick up the document the accepted edit produced
  }

  /** Replace the whole document (entity add/remove, label edits). */
  async replaceDocument(document: SceneDocument): Promise<void> {
    if (this.revision < 0) throw new Error("scene not loaded");
    try {
      const ref = await this.client.replaceScene(this.sceneId, document, this.revision);
      this.revision = ref.revision;
    } catch (err) {
      if (!(err instanceof ConflictError)) throw err;
      await this.load();
      this.notices.push({
        kind: "conflict-reloaded",
        message: `scene changed in another session; reloaded at revision ${this.revision} and retried`,
      });
      const ref = await this.client.replaceScene(this.sceneId, document, this.revision);
      this.revision = ref.revision;
    }
    await this.load();
  }

  /** Fetch the preview for the active frame at the current revision. */
  async refreshPreview(kind: "depth" | "id" = "depth"): Promise<Uint8Array> {
    const { bytes } = await this.client.preview(this.sceneId, this.activeFrame, kind);
    return bytes;
  }

  async exportCameraTxt(): Promise<string> {
    return this.client.cameraTxt(this.sceneId);
  }

  async exportBundle(outDir: string, far = 1000.0): Promise<Record<string, unknown>> {
    const resp = await this.client.exportBundle(this.sceneId, {
      out_dir: outDir,
      far,
    });
    return resp.meta;
  }
}
