/** Freehand path capture: downsampling and stroke assembly. */

import type { StrokeIn } from "./api.js";

export type PixelPoint = [row: number, col: number];

/**
 * Reduce a freehand pointer path to at most one point per pixel step.
 *
 * Raw pointermove events fire faster than the pointer crosses pixels, so a
 * path carries long stretches of duplicates once rounded to the grid. Keep
 * a point only when its rounded pixel differs from the previously kept one.
 * A click without drag stays a single point.
 */
export function downsamplePath(path: readonly (readonly [number, number])[]): PixelPoint[] {
  const kept: PixelPoint[] = [];
  for (const [r, c] of path) {
    const pixel: PixelPoint = [Math.round(r), Math.round(c)];
    const last = kept[kept.length - 1];
    if (!last || last[0] !== pixel[0] || last[1] !== pixel[1]) {
      kept.push(pixel);
    }
  }
  return kept;
}

/** Clamp points to the slice bounds (drags can leave the canvas). */
export function clampToSlice(
  points: readonly PixelPoint[],
  rows: number,
  cols: number,
): PixelPoint[] {
  return points.map(([r, c]) => [
    Math.min(Math.max(r, 0), rows - 1),
    Math.min(Math.max(c, 0), cols - 1),
  ]);
}

export interface StrokeDraft {
  label: number;
  sliceZ: number;
  brushRadius: number;
  path: [number, number][];
  startedAtMs: number;
}

/** Finalize a draft into the wire format, downsampled and time-stamped. */
export function finishStroke(
  draft: StrokeDraft,
  rows: number,
  cols: number,
  nowMs: number,
): StrokeIn | null {
  const points = clampToSlice(downsamplePath(draft.path), rows, cols);
  if (points.length === 0) return null;
  return {
    label: draft.label,
    slice_z: draft.sliceZ,
    points,
    brush_radius: draft.brushRadius,
    elapsed_ms: Math.max(0, nowMs - draft.startedAtMs),
  };
}
