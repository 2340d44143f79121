/** DOM glue: wires the canvas, controls and API client together. */

import { ApiClient, ApiError, PreviewParams, PreviewResult } from "./api.js";
import { PreviewScheduler } from "./scheduler.js";
import {
  calibrationPointsDistinct,
  canSubmitCalibration,
  clampCrop,
  clampMinArea,
  clampThreshold,
  initialState,
  ToolMode,
  UiState,
} from "./state.js";
import { clampPixelToImage, Point, ViewTransform } from "./transform.js";

const state: UiState = initialState();
const view = new ViewTransform();
const api = new ApiClient();

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const el = {
  fileInput: document.getElementById("file-input") as HTMLInputElement,
  sessionLabel: document.getElementById("session-label") as HTMLElement,
  resumeInput: document.getElementById("resume-input") as HTMLInputElement,
  resumeButton: document.getElementById("resume-button") as HTMLButtonElement,
  polarity: document.getElementById("polarity") as HTMLSelectElement,
  threshold: document.getElementById("threshold") as HTMLInputElement,
  thresholdValue: document.getElementById("threshold-value") as HTMLElement,
  minArea: document.getElementById("min-area") as HTMLInputElement,
  areaReadout: document.getElementById("area-readout") as HTMLElement,
  clearCrop: document.getElementById("clear-crop") as HTMLButtonElement,
  calPoints: document.getElementById("cal-points") as HTMLElement,
  realLength: document.getElementById("real-length") as HTMLInputElement,
  calSubmit: document.getElementById("cal-submit") as HTMLButtonElement,
  declaredDpi: document.getElementById("declared-dpi") as HTMLInputElement,
  dpiSubmit: document.getElementById("dpi-submit") as HTMLButtonElement,
  dpiReadout: document.getElementById("dpi-readout") as HTMLElement,
  measure: document.getElementById("measure") as HTMLButtonElement,
  metrics: document.getElementById("metrics") as HTMLElement,
  warnings: document.getElementById("warnings") as HTMLElement,
  errorBanner: document.getElementById("error-banner") as HTMLElement,
  zoomIn: document.getElementById("zoom-in") as HTMLButtonElement,
  zoomOut: document.getElementById("zoom-out") as HTMLButtonElement,
  zoomReset: document.getElementById("zoom-reset") as HTMLButtonElement,
  zoomLevel: document.getElementById("zoom-level") as HTMLElement,
};

let originalBitmap: ImageBitmap | null = null;
let overlayBitmap: ImageBitmap | null = null;
let overlayOrigin: Point = { x: 0, y: 0 };
let overlaySeq = 0;
let dragStart: Point | null = null;
let dragMoved = false;
let dragRect: { a: Point; b: Point } | null = null;

const scheduler = new PreviewScheduler<PreviewParams, PreviewResult>({
  send: (params) => {
    if (state.sessionId === null) return Promise.reject(new Error("no session"));
    return api.preview(state.sessionId, params);
  },
  onResult: (result, params) => void applyPreview(result, params),
  onError: (error) => showError(error),
});

function showError(error: unknown): void {
  const message =
    error instanceof ApiError && error.code === "EmptyMask"
      ? "no leaf detected at this threshold"
      : error instanceof Error
        ? error.message
        : String(error);
  state.lastError = message;
  el.errorBanner.textContent = message;
  el.errorBanner.hidden = false;
}

function clearError(): void {
  state.lastError = null;
  el.errorBanner.hidden = true;
}

async function applyPreview(result: PreviewResult, params: PreviewParams): Promise<void> {
  clearError();
  const mySeq = ++overlaySeq;
  // displayed bytes are exactly the server payload; only placement is ours
  const bitmap = await createImageBitmap(new Blob([result.overlayPng as BlobPart], { type: "image/png" }));
  if (mySeq !== overlaySeq) return; // a newer overlay finished decoding first
  overlayBitmap = bitmap;
  overlayOrigin = params.crop ? { x: params.crop.x, y: params.crop.y } : { x: 0, y: 0 };
  el.areaReadout.textContent =
    `${result.counts.area_px.toLocaleString()} px in ` +
    `${result.counts.component_count} object(s)`;
  render();
}

function requestPreview(): void {
  if (state.sessionId === null) return;
  scheduler.request({
    crop: state.pendingCrop,
    polarity: state.polarity,
    threshold: state.threshold,
    min_area: state.minArea,
    persist: true,
  });
}

function render(): void {
  const w = canvas.clientWidth;
  const h = canvas.clientHeight;
  if (canvas.width !== w || canvas.height !== h) {
    canvas.width = w;
    canvas.height = h;
  }
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.clearRect(0, 0, w, h);
  if (originalBitmap === null) return;
  ctx.imageSmoothingEnabled = false; // nearest-neighbor: pixel edges stay visible
  ctx.setTransform(view.scale, 0, 0, view.scale, view.offsetX, view.offsetY);
  ctx.drawImage(originalBitmap, 0, 0);
  if (overlayBitmap !== null) ctx.drawImage(overlayBitmap, overlayOrigin.x, overlayOrigin.y);

  ctx.setTransform(1, 0, 0, 1, 0, 0);
  if (state.pendingCrop !== null) {
    const a = view.imageToScreen({ x: state.pendingCrop.x, y: state.pendingCrop.y });
    const b = view.imageToScreen({
      x: state.pendingCrop.x + state.pendingCrop.w,
      y: state.pendingCrop.y + state.pendingCrop.h,
    });
    ctx.strokeStyle = "#2266ff";
    ctx.lineWidth = 2;
    ctx.strokeRect(a.x, a.y, b.x - a.x, b.y - a.y);
  }
  if (dragRect !== null) {
    ctx.strokeStyle = "#2266ff";
    ctx.setLineDash([5, 4]);
    ctx.strokeRect(
      dragRect.a.x,
      dragRect.a.y,
      dragRect.b.x - dragRect.a.x,
      dragRect.b.y - dragRect.a.y,
    );
    ctx.setLineDash([]);
  }
  for (const p of state.calibrationPoints) {
    const s = view.imageToScreen({ x: p.x + 0.5, y: p.y + 0.5 });
    ctx.strokeStyle = "#ff9900";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(s.x - 8, s.y);
    ctx.lineTo(s.x + 8, s.y);
    ctx.moveTo(s.x, s.y - 8);
    ctx.lineTo(s.x, s.y + 8);
    ctx.stroke();
  }
  el.zoomLevel.textContent = `${Math.round(view.scale * 100)}%`;
}

function refreshCalibrationControls(): void {
  const pts = state.calibrationPoints;
  el.calPoints.textContent =
    pts.length === 0
      ? "points: none"
      : pts.map((p, i) => `p${i + 1}=(${p.x}, ${p.y})`).join("  ");
  el.calSubmit.disabled = !canSubmitCalibration(state);
}

async function attachSession(id: string): Promise<void> {
  const resp = await fetch(api.imageUrl(id));
  if (!resp.ok) {
    showError(new ApiError(resp.status, "UnknownSession", `cannot load session ${id}`));
    return;
  }
  originalBitmap = await createImageBitmap(await resp.blob());
  overlayBitmap = null;
  state.sessionId = id;
  state.imageWidth = originalBitmap.width;
  state.imageHeight = originalBitmap.height;
  state.pendingCrop = null;
  state.calibrationPoints = [];
  el.clearCrop.disabled = true;
  el.sessionLabel.textContent = `session ${id}`;
  refreshCalibrationControls();
  view.fit(state.imageWidth, state.imageHeight, canvas.clientWidth, canvas.clientHeight);
  render();
  requestPreview();
}

el.fileInput.addEventListener("change", async () => {
  const file = el.fileInput.files?.[0];
  if (!file) return;
  clearError();
  try {
    const info = await api.createSession(file);
    await attachSession(info.id);
  } catch (error) {
    showError(error);
  }
});

el.resumeButton.addEventListener("click", () => {
  const id = el.resumeInput.value.trim();
  if (id) void attachSession(id);
});

for (const radio of document.querySelectorAll<HTMLInputElement>('input[name="mode"]')) {
  radio.addEventListener("change", () => {
    if (radio.checked) state.mode = radio.value as ToolMode;
  });
}

el.threshold.addEventListener("input", () => {
  state.threshold = clampThreshold(Number(el.threshold.value));
  el.thresholdValue.textContent = String(state.threshold);
  requestPreview();
});

el.polarity.addEventListener("change", () => {
  state.polarity = el.polarity.value === "black" ? "black" : "white";
  requestPreview();
});

el.minArea.addEventListener("change", () => {
  state.minArea = clampMinArea(Number(el.minArea.value));
  el.minArea.value = String(state.minArea);
  requestPreview();
});

el.clearCrop.addEventListener("click", () => {
  state.pendingCrop = null;
  el.clearCrop.disabled = true;
  render();
  requestPreview();
});

canvas.addEventListener("mousedown", (e) => {
  dragStart = { x: e.offsetX, y: e.offsetY };
  dragMoved = false;
});

canvas.addEventListener("mousemove", (e) => {
  if (dragStart === null) return;
  const here = { x: e.offsetX, y: e.offsetY };
  if (Math.abs(here.x - dragStart.x) + Math.abs(here.y - dragStart.y) > 3) dragMoved = true;
  if (!dragMoved) return;
  if (state.mode === "crop") {
    dragRect = { a: dragStart, b: here };
  } else {
    view.panBy(e.movementX, e.movementY);
  }
  render();
});

canvas.addEventListener("mouseup", (e) => {
  if (dragStart === null) return;
  const up = { x: e.offsetX, y: e.offsetY };
  if (state.mode === "crop" && dragMoved) {
    const a = view.screenToImage(dragStart);
    const b = view.screenToImage(up);
    const rect = clampCrop(
      {
        x: Math.floor(Math.min(a.x, b.x)),
        y: Math.floor(Math.min(a.y, b.y)),
        w: Math.ceil(Math.abs(b.x - a.x)),
        h: Math.ceil(Math.abs(b.y - a.y)),
      },
      state.imageWidth,
      state.imageHeight,
    );
    if (rect !== null) {
      state.pendingCrop = rect;
      el.clearCrop.disabled = false;
      requestPreview();
    }
  } else if (state.mode === "calibrate" && !dragMoved && originalBitmap !== null) {
    const pixel = clampPixelToImage(
      view.screenToImagePixel(up),
      state.imageWidth,
      state.imageHeight,
    );
    if (state.calibrationPoints.length >= 2) state.calibrationPoints = [];
    state.calibrationPoints.push(pixel);
    refreshCalibrationControls();
  }
  dragStart = null;
  dragRect = null;
  render();
});

canvas.addEventListener("mouseleave", () => {
  dragStart = null;
  dragRect = null;
  render();
});

canvas.addEventListener("wheel", (e) => {
  e.preventDefault();
  view.zoomAt({ x: e.offsetX, y: e.offsetY }, e.deltaY < 0 ? 1.25 : 0.8);
  render();
});

el.zoomIn.addEventListener("click", () => {
  view.zoomAt({ x: canvas.clientWidth / 2, y: canvas.clientHeight / 2 }, 1.25);
  render();
});
el.zoomOut.addEventListener("click", () => {
  view.zoomAt({ x: canvas.clientWidth / 2, y: canvas.clientHeight / 2 }, 0.8);
  render();
});
el.zoomReset.addEventListener("click", () => {
  view.fit(state.imageWidth || 1, state.imageHeight || 1, canvas.clientWidth, canvas.clientHeight);
  render();
});

el.realLength.addEventListener("input", () => {
  const v = Number(el.realLength.value);
  state.realLengthMm = Number.isFinite(v) && el.realLength.value !== "" ? v : null;
  refreshCalibrationControls();
});

el.calSubmit.addEventListener("click", async () => {
  if (!canSubmitCalibration(state) || state.sessionId === null) return;
  if (!calibrationPointsDistinct(state)) {
    showError(new Error("pick two different points on the reference object"));
    return;
  }
  const [p1, p2] = state.calibrationPoints;
  try {
    const cal = await api.calibrate(state.sessionId, {
      p1: [p1.x, p1.y],
      p2: [p2.x, p2.y],
      real_length_mm: state.realLengthMm!,
    });
    state.dpi = cal.dpi;
    el.dpiReadout.textContent = `dpi: ${cal.dpi.toFixed(2)} (${cal.source})`;
    clearError();
  } catch (error) {
    showError(error);
  }
});

el.dpiSubmit.addEventListener("click", async () => {
  const dpi = Number(el.declaredDpi.value);
  if (!Number.isFinite(dpi) || dpi <= 0 || state.sessionId === null) return;
  try {
    const cal = await api.calibrate(state.sessionId, { dpi });
    state.dpi = cal.dpi;
    el.dpiReadout.textContent = `dpi: ${cal.dpi.toFixed(2)} (${cal.source})`;
    clearError();
  } catch (error) {
    showError(error);
  }
});

el.measure.addEventListener("click", async () => {
  if (state.sessionId === null) return;
  try {
    const result = await api.measure(state.sessionId);
    state.lastMetrics = result.metrics;
    state.lastWarnings = result.warnings;
    clearError();
    const m = result.metrics;
    el.metrics.innerHTML = "";
    const rows: Array<[string, string]> = [
      ["area", `${m.area_mm2.toFixed(2)} mm² (${m.area_px.toLocaleString()} px)`],
      ["length", `${m.length_mm.toFixed(2)} mm (${m.length_px.toLocaleString()} px)`],
      ["mean width", `${m.width_mm.toFixed(2)} mm`],
      ["objects", String(m.component_count)],
      ["branch points", String(m.skeleton_branch_points)],
    ];
    for (const [k, v] of rows) {
      const dt = document.createElement("dt");
      dt.textContent = k;
      const dd = document.createElement("dd");
      dd.textContent = v;
      el.metrics.append(dt, dd);
    }
    el.warnings.innerHTML = "";
    for (const warning of result.warnings) {
      const li = document.createElement("li");
      li.textContent = warning;
      el.warnings.appendChild(li);
    }
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      showError(new Error("calibrate first: pick two reference points or enter a dpi"));
    } else {
      showError(error);
    }
  }
});

window.addEventListener("resize", render);
render();
