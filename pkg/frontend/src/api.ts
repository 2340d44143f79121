/** Typed client for the measurement service under /api/v1. */

import { boundaryOf, parseMultipart, partOfType } from "./multipart.js";
import type { CropRect, Metrics, Polarity } from "./state.js";

export interface PreviewParams {
  crop: CropRect | null;
  polarity: Polarity;
  threshold: number;
  min_area: number;
  persist: boolean;
}

export interface PreviewCounts {
  area_px: number;
  component_count: number;
}

export interface PreviewResult {
  overlayPng: Uint8Array;
  counts: PreviewCounts;
}

export interface SessionInfo {
  id: string;
  width: number;
  height: number;
}

export interface MeasureResult {
  metrics: Metrics;
  warnings: string[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function raiseFor(resp: Response): Promise<never> {
  let code = "HttpError";
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = await resp.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
    }
  } catch {
    // not JSON; keep the generic message
  }
  throw new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(public base = "/api/v1") {}

  async createSession(file: Blob): Promise<SessionInfo> {
    const form = new FormData();
    form.append("file", file, "scan.png");
    const resp = await fetch(`${this.base}/sessions`, { method: "POST", body: form });
    if (!resp.ok) await raiseFor(resp);
    return resp.json();
  }

  imageUrl(sessionId: string): string {
    return `${this.base}/sessions/${sessionId}/image`;
  }

  async preview(sessionId: string, params: PreviewParams): Promise<PreviewResult> {
    const resp = await fetch(`${this.base}/sessions/${sessionId}/preview`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(params),
    });
    if (!resp.ok) await raiseFor(resp);
    const boundary = boundaryOf(resp.headers.get("content-type") ?? "");
    if (boundary === null) throw new ApiError(500, "BadResponse", "preview is not multipart");
    const parts = parseMultipart(new Uint8Array(await resp.arrayBuffer()), boundary);
    const png = partOfType(parts, "image/png");
    const json = partOfType(parts, "application/json");
    if (png === null || json === null) {
      throw new ApiError(500, "BadResponse", "preview multipart is missing a part");
    }
    return {
      overlayPng: png.body,
      counts: JSON.parse(new TextDecoder().decode(json.body)),
    };
  }

  async calibrate(
    sessionId: string,
    body: { dpi: number } | { p1: [number, number]; p2: [number, number]; real_length_mm: number },
  ): Promise<{ dpi: number; source: string }> {
    const resp = await fetch(`${this.base}/sessions/${sessionId}/calibration`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await raiseFor(resp);
    return resp.json();
  }

  async measure(sessionId: string): Promise<MeasureResult> {
    const resp = await fetch(`${this.base}/sessions/${sessionId}/measure`, { method: "POST" });
    if (!resp.ok) await raiseFor(resp);
    return resp.json();
  }

  async deleteSession(sessionId: string): Promise<void> {
    const resp = await fetch(`${this.base}/sessions/${sessionId}`, { method: "DELETE" });
    if (!resp.ok && resp.status !== 404) await raiseFor(resp);
  }
}
