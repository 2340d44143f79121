/** UI state and the client-side clamps that mirror the server's domains. */

import type { Point } from "./transform.js";

export type ToolMode = "crop" | "threshold" | "calibrate";
export type Polarity = "white" | "black";

export interface CropRect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Metrics {
  area_px: number;
  length_px: number;
  mean_width_px: number;
  area_mm2: number;
  length_mm: number;
  width_mm: number;
  component_count: number;
  skeleton_branch_points: number;
}

export interface UiState {
  sessionId: string | null;
  imageWidth: number;
  imageHeight: number;
  mode: ToolMode;
  polarity: Polarity;
  threshold: number;
  minArea: number;
  pendingCrop: CropRect | null;
  calibrationPoints: Point[];
  realLengthMm: number | null;
  dpi: number | null;
  lastMetrics: Metrics | null;
  lastWarnings: string[];
  lastError: string | null;
}

export function initialState(): UiState {
  return {
    sessionId: null,
    imageWidth: 0,
    imageHeight: 0,
    mode: "threshold",
    polarity: "white",
    threshold: 128,
    minArea: 50,
    pendingCrop: null,
    calibrationPoints: [],
    realLengthMm: null,
    dpi: null,
    lastMetrics: null,
    lastWarnings: [],
    lastError: null,
  };
}

export function clampThreshold(value: number): number {
  if (!Number.isFinite(value)) return 0;
  return Math.min(255, Math.max(0, Math.round(value)));
}

export function clampMinArea(value: number): number {
  if (!Number.isFinite(value)) return 0;
  return Math.max(0, Math.round(value));
}

/** Clamp a dragged rectangle to the image; returns null when degenerate. */
export function clampCrop(rect: CropRect, width: number, height: number): CropRect | null {
  const x = Math.min(Math.max(0, rect.x), width - 1);
  const y = Math.min(Math.max(0, rect.y), height - 1);
  const w = Math.min(rect.w, width - x);
  const h = Math.min(rect.h, height - y);
  if (w < 1 || h < 1) return null;
  return { x, y, w, h };
}

export function canSubmitCalibration(state: UiState): boolean {
  return (
    state.calibrationPoints.length === 2 &&
    state.realLengthMm !== null &&
    Number.isFinite(state.realLengthMm) &&
    state.realLengthMm > 0
  );
}

export function calibrationPointsDistinct(state: UiState): boolean {
  if (state.calibrationPoints.length !== 2) return false;
  const [a, b] = state.calibrationPoints;
  return a.x !== b.x || a.y !== b.y;
}
