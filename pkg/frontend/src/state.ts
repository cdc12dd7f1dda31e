/**
 * View state for the annotator: current exam, slice, brush, algorithm
 * choice, and the optimistic stroke ledger.
 *
 * Strokes render locally the moment the pointer lifts, then reconcile
 * against the server's stroke count. A stroke rejected with 422 is removed
 * again; strokes drawn while a segmentation holds the exam lock (409 busy)
 * queue locally and flush once the lock clears.
 */

import type { SessionState, StrokeIn } from "./api.js";

export const INTERIOR_LABEL = 1;
export const EXTERIOR_LABEL = -1;

export interface Brush {
  label: typeof INTERIOR_LABEL | typeof EXTERIOR_LABEL;
  radius: number;
}

export type Algorithm = "bgrowth3d" | "bgrowth2d" | "growcut";

export interface ViewState {
  examId: string;
  slices: number;
  currentSlice: number;
  brush: Brush;
  overlayOpacity: number;
  algorithm: Algorithm;
  sliceDistance: number;
  /** Strokes the server has confirmed. */
  confirmed: StrokeIn[];
  /** Strokes drawn locally but not yet accepted (busy server). */
  pending: StrokeIn[];
}

export function initialState(examId: string, slices: number): ViewState {
  if (slices < 1) throw new Error(`exam has no slices`);
  return {
    examId,
    slices,
    currentSlice: Math.floor(slices / 2),
    brush: { label: INTERIOR_LABEL, radius: 1 },
    overlayOpacity: 0.45,
    algorithm: "bgrowth3d",
    sliceDistance: 0,
    confirmed: [],
    pending: [],
  };
}

/** Clamp a slice change into the exam's range. */
export function withSlice(state: ViewState, z: number): ViewState {
  const clamped = Math.min(Math.max(Math.round(z), 0), state.slices - 1);
  return { ...state, currentSlice: clamped };
}

export function withBrushLabel(state: ViewState, label: number): ViewState {
  if (label !== INTERIOR_LABEL && label !== EXTERIOR_LABEL) {
    throw new Error(`brush label must be ${INTERIOR_LABEL} or ${EXTERIOR_LABEL}`);
  }
  return { ...state, brush: { ...state.brush, label } };
}

/** All strokes visible to the operator, confirmed plus queued. */
export function visibleStrokes(state: ViewState): StrokeIn[] {
  return [...state.confirmed, ...state.pending];
}

/** Seeds exist when both an interior and an exterior stroke are visible. */
export function canSegment(state: ViewState): boolean {
  const strokes = visibleStrokes(state);
  return strokes.some((s) => s.label > 0) && strokes.some((s) => s.label < 0);
}

/** Queue a stroke locally (drawn while the server was busy). */
export function queueStroke(state: ViewState, stroke: StrokeIn): ViewState {
  return { ...state, pending: [...state.pending, stroke] };
}

/** Server accepted a stroke: move it from pending into confirmed. */
export function confirmStroke(state: ViewState, stroke: StrokeIn): ViewState {
  return {
    ...state,
    confirmed: [...state.confirmed, stroke],
    pending: state.pending.filter((s) => s !== stroke),
  };
}

/** Server rejected a stroke (422): drop it from wherever it sits. */
export function rejectStroke(state: ViewState, stroke: StrokeIn): ViewState {
  return {
    ...state,
    confirmed: state.confirmed.filter((s) => s !== stroke),
    pending: state.pending.filter((s) => s !== stroke),
  };
}

/** Undo confirmed by the server: drop the most recent confirmed stroke. */
export function dropLastConfirmed(state: ViewState): ViewState {
  return { ...state, confirmed: state.confirmed.slice(0, -1) };
}

/**
 * Reconcile with a server session snapshot. The server is authoritative:
 * its stroke list replaces the confirmed ledger. Returns the new state and
 * whether the local view had drifted (drift means a repaint is needed).
 */
export function reconcile(
  state: ViewState,
  server: SessionState,
): { state: ViewState; drifted: boolean } {
  const serverStrokes = server.session?.strokes ?? state.confirmed;
  const drifted =
    server.total_strokes !== state.confirmed.length ||
    JSON.stringify(serverStrokes) !== JSON.stringify(state.confirmed);
  return {
    state: { ...state, confirmed: serverStrokes },
    drifted,
  };
}
