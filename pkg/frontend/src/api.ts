/** Typed HTTP client for the scene service. All server interaction in the
 * editor goes through this module; it never touches files directly. */

import type {
  KeyframeRequest,
  SceneDocument,
  SceneRef,
  SceneResponse,
  Violation,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly endpoint: string,
    public readonly detail: string
  ) {
    super(`${endpoint}: HTTP ${status}: ${detail}`);
  }
}

export class ConflictError extends ApiError {
  constructor(endpoint: string, detail: string) {
    super(409, endpoint, detail);
  }
}

export interface ExportBundleRequest {
  out_dir: string;
  width?: number | null;
  height?: number | null;
  near?: number;
  far?: number;
  depth_scale?: number;
  depth_encoding?: "png16" | "pfm";
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class SceneClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args)
  ) {}

  private async request(
    method: string,
    path: string,
    body?: unknown,
    ifMatch?: number
  ): Promise<Response> {
    const headers: Record<string, string> = {};
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    if (ifMatch !== undefined) headers["If-Match"] = String(ifMatch);
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      const detail = await resp.text();
      if (resp.status === 409) throw new ConflictError(path, detail);
      throw new ApiError(resp.status, path, detail);
    }
    return resp;
  }

  async createScene(document: SceneDocument): Promise<SceneRef> {
    const resp = await this.request("POST", "/scenes", document);
    return (await resp.json()) as SceneRef;
  }

  async getScene(id: string): Promise<SceneResponse> {
    const resp = await this.request("GET", `/scenes/${id}`);
    return (await resp.json()) as SceneResponse;
  }

  async replaceScene(
    id: string,
    document: SceneDocument,
    ifMatch: number
  ): Promise<SceneRef> {
    const resp = await this.request("PUT", `/scenes/${id}`, document, ifMatch);
    return (await resp.json()) as SceneRef;
  }

  async editKeyframe(
    id: string,
    req: KeyframeRequest,
    ifMatch: number
  ): Promise<SceneRef> {
    const resp = await this.request(
      "POST",
      `/scenes/${id}/keyframes`,
      req,
      ifMatch
    );
    return (await resp.json()) as SceneRef;
  }

  async preview(
    id: string,
    frame: number,
    kind: "depth" | "id" = "depth",
    width?: number,
    height?: number
  ): Promise<{ bytes: Uint8Array; revision: number }> {
    const params = new URLSearchParams({ kind });
    if (width !== undefined) params.set("width", String(width));
    if (height !== undefined) params.set("height", String(height));
    const resp = await this.request(
      "GET",
      `/scenes/${id}/preview/${frame}?${params}`
    );
    const bytes = new Uint8Array(await resp.arrayBuffer());
    const revision = parseInt(resp.headers.get("X-Scene-Revision") ?? "-1", 10);
    return { bytes, revision };
  }

  async cameraTxt(id: string): Promise<string> {
    const resp = await this.request("GET", `/scenes/${id}/camera.txt`);
    return await resp.text();
  }

  async validate(id: string): Promise<Violation[]> {
    const resp = await this.request("POST", `/scenes/${id}/validate`);
    return ((await resp.json()) as { violations: Violation[] }).violations;
  }

  async exportBundle(
    id: string,
    req: ExportBundleRequest
  ): Promise<{ id: string; revision: number; meta: Record<string, unknown> }> {
    const resp = await this.request("POST", `/scenes/${id}/export-bundle`, req);
    return (await resp.json()) as {
      id: string;
      revision: number;
      meta: Record<string, unknown>;
    };
  }
}
