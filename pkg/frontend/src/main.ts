/** Browser entry: wires the slice viewer, brush, and segmentation panel. */

import { AnnotatorApi, ApiError } from "./api.js";
import type { ExamInfo, SegmentResponse, StrokeIn } from "./api.js";
import { COLOR_RESULT, paintRuns, paintStroke } from "./overlay.js";
import type { Run, SliceDims } from "./rle.js";
import * as state from "./state.js";
import type { StrokeDraft } from "./strokes.js";
import { finishStroke } from "./strokes.js";
import { SliceTimer } from "./timer.js";

const api = new AnnotatorApi("");
const timer = new SliceTimer();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const examSelect = el<HTMLSelectElement>("exam");
const sliceSlider = el<HTMLInputElement>("slice");
const sliceLabel = el<HTMLSpanElement>("slice-label");
const baseCanvas = el<HTMLCanvasElement>("base");
const overlayCanvas = el<HTMLCanvasElement>("overlay");
const interiorBtn = el<HTMLButtonElement>("brush-interior");
const exteriorBtn = el<HTMLButtonElement>("brush-exterior");
const radiusInput = el<HTMLInputElement>("radius");
const undoBtn = el<HTMLButtonElement>("undo");
const algoSelect = el<HTMLSelectElement>("algorithm");
const distanceInput = el<HTMLInputElement>("distance");
const opacityInput = el<HTMLInputElement>("opacity");
const runBtn = el<HTMLButtonElement>("run");
const statusLine = el<HTMLDivElement>("status");
const metricsPanel = el<HTMLPreElement>("metrics");

let exams: ExamInfo[] = [];
let view: state.ViewState | null = null;
let dims: SliceDims = [1, 1];
let lastMasks = new Map<number, Run[]>();
let lastResult: SegmentResponse | null = null;
let draft: StrokeDraft | null = null;
const runHistory: string[] = [];

function status(text: string): void {
  statusLine.textContent = text;
}

function currentExam(): ExamInfo {
  const info = exams.find((e) => e.exam_id === view?.examId);
  if (!info) throw new Error("no exam selected");
  return info;
}

async function loadExams(): Promise<void> {
  exams = await api.listExams();
  examSelect.replaceChildren(
    ...exams.map((e) => {
      const opt = document.createElement("option");
      opt.value = e.exam_id;
      opt.textContent = `${e.exam_id} (${e.dims.join("x")})`;
      return opt;
    }),
  );
  if (exams.length > 0) await selectExam(exams[0]!.exam_id);
}

async function selectExam(examId: string): Promise<void> {
  const info = exams.find((e) => e.exam_id === examId);
  if (!info) return;
  view = state.initialState(examId, info.slices);
  dims = [info.dims[0], info.dims[1]];
  baseCanvas.width = overlayCanvas.width = dims[1];
  baseCanvas.height = overlayCanvas.height = dims[0];
  sliceSlider.max = String(info.slices - 1);
  sliceSlider.value = String(view.currentSlice);
  lastMasks = new Map();
  lastResult = null;
  const server = await api.getStrokes(examId);
  view = state.reconcile(view, server).state;
  timer.focus(view.currentSlice, performance.now());
  await repaint();
}

async function repaint(): Promise<void> {
  if (!view) return;
  const z = view.currentSlice;
  sliceLabel.textContent = `slice ${z}/${view.slices - 1}`;

  const img = new Image();
  img.src = api.sliceUrl(view.examId, z) + `?t=${Date.now()}`;
  await img.decode();
  const base = baseCanvas.getContext("2d");
  if (base) base.drawImage(img, 0, 0);

  const ctx = overlayCanvas.getContext("2d");
  if (!ctx) return;
  const image = ctx.createImageData(dims[1], dims[0]);
  const buffer = image.data;
  const mask = lastMasks.get(z);
  if (mask) paintRuns(buffer, mask, dims, COLOR_RESULT, view.overlayOpacity);
  for (const stroke of state.visibleStrokes(view)) {
    if (stroke.slice_z === z) paintStroke(buffer, stroke, dims);
  }
  ctx.putImageData(image, 0, 0);
  runBtn.disabled = !state.canSegment(view);
}

function canvasPoint(ev: PointerEvent): [number, number] {
  const rect = overlayCanvas.getBoundingClientRect();
  const col = ((ev.clientX - rect.left) / rect.width) * dims[1];
  const row = ((ev.clientY - rect.top) / rect.height) * dims[0];
  return [row, col];
}

async function submitStroke(stroke: StrokeIn): Promise<void> {
  if (!view) return;
  view = state.queueStroke(view, stroke);
  await repaint();
  try {
    const server = await api.postStroke(view.examId, stroke);
    view = state.confirmStroke(view, stroke);
    if (server.total_strokes !== view.confirmed.length) {
      const full = await api.getStrokes(view.examId);
      view = state.reconcile(view, full).state;
    }
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      status("server busy; stroke queued, retrying...");
      setTimeout(() => void flushPending(), 500);
      return;
    }
    view = state.rejectStroke(view, stroke);
    status(err instanceof Error ? `stroke rejected: ${err.message}` : "stroke rejected");
  }
  await repaint();
}

async function flushPending(): Promise<void> {
  if (!view) return;
  const queued = [...view.pending];
  for (const stroke of queued) {
    try {
      await api.postStroke(view.examId, stroke);
      view = state.confirmStroke(view, stroke);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        setTimeout(() => void flushPending(), 500);
        return;
      }
      view = state.rejectStroke(view, stroke);
    }
  }
  status("");
  await repaint();
}

async function runSegmentation(): Promise<void> {
  if (!view) return;
  runBtn.disabled = true;
  status(`running ${view.algorithm} at distance ${view.sliceDistance}...`);
  try {
    const res = await api.segment(view.examId, {
      algorithm: view.algorithm,
      slice_distance: view.sliceDistance,
    });
    lastResult = res;
    lastMasks = new Map();
    for (let z = 0; z < view.slices; z++) {
      const mask = await api.getMask(view.examId, z);
      lastMasks.set(z, mask.runs);
    }
    const line =
      `${res.result_id} ${view.algorithm} d${view.sliceDistance}: ` +
      `${res.iterations} sweeps, ${res.elapsed_s.toFixed(3)}s` +
      (res.metrics
        ? `, dsc ${res.metrics.dsc.toFixed(4)} jac ${res.metrics.jac.toFixed(4)}` +
          ` hd ${res.metrics.hd.toFixed(2)}` +
          `, annotation ${res.metrics.annotation_seconds.toFixed(1)}s`
        : "");
    runHistory.push(line);
    metricsPanel.textContent = runHistory.slice(-6).join("\n");
    status(res.converged ? "" : "hit the iteration cap before converging");
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      status(`cannot run: ${err.detail} (add exterior seeds?)`);
    } else {
      status(err instanceof Error ? err.message : "segmentation failed");
    }
  }
  await repaint();
}

overlayCanvas.addEventListener("pointerdown", (ev) => {
  if (!view) return;
  overlayCanvas.setPointerCapture(ev.pointerId);
  timer.activity(performance.now());
  draft = {
    label: view.brush.label,
    sliceZ: view.currentSlice,
    brushRadius: view.brush.radius,
    path: [canvasPoint(ev)],
    startedAtMs: performance.now(),
  };
});

overlayCanvas.addEventListener("pointermove", (ev) => {
  timer.activity(performance.now());
  if (draft) draft.path.push(canvasPoint(ev));
});

overlayCanvas.addEventListener("pointerup", () => {
  if (!draft) return;
  const stroke = finishStroke(draft, dims[0], dims[1], performance.now());
  draft = null;
  if (stroke) void submitStroke(stroke);
});

examSelect.addEventListener("change", () => void selectExam(examSelect.value));

sliceSlider.addEventListener("input", () => {
  if (!view) return;
  view = state.withSlice(view, Number(sliceSlider.value));
  timer.focus(view.currentSlice, performance.now());
  void repaint();
});

interiorBtn.addEventListener("click", () => {
  if (!view) return;
  view = state.withBrushLabel(view, state.INTERIOR_LABEL);
  interiorBtn.classList.add("active");
  exteriorBtn.classList.remove("active");
});

exteriorBtn.addEventListener("click", () => {
  if (!view) return;
  view = state.withBrushLabel(view, state.EXTERIOR_LABEL);
  exteriorBtn.classList.add("active");
  interiorBtn.classList.remove("active");
});

radiusInput.addEventListener("change", () => {
  if (!view) return;
  view.brush.radius = Math.max(0, Number(radiusInput.value) | 0);
});

undoBtn.addEventListener("click", () => {
  if (!view) return;
  void api
    .undoStroke(view.examId)
    .then(() => {
      if (view) view = state.dropLastConfirmed(view);
      return repaint();
    })
    .catch((err: unknown) => {
      status(err instanceof ApiError && err.status === 404 ? "nothing to undo" : String(err));
    });
});

algoSelect.addEventListener("change", () => {
  if (view) view.algorithm = algoSelect.value as state.Algorithm;
});

distanceInput.addEventListener("change", () => {
  if (view) view.sliceDistance = Math.max(0, Number(distanceInput.value) | 0);
});

opacityInput.addEventListener("input", () => {
  if (!view) return;
  view.overlayOpacity = Number(opacityInput.value);
  void repaint();
});

runBtn.addEventListener("click", () => void runSegmentation());

document.addEventListener("visibilitychange", () => {
  if (document.hidden) timer.blur(performance.now());
  else if (view) timer.focus(view.currentSlice, performance.now());
});

window.addEventListener("keydown", () => timer.activity(performance.now()));

void loadExams().catch((err: unknown) => {
  status(`failed to load exams: ${String(err)}`);
});
