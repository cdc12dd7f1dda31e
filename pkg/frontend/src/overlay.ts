/**
 * Pure pixel-buffer rendering for overlays, kept free of canvas handles so
 * it runs under plain unit tests. The UI blits these RGBA buffers onto its
 * overlay canvas via ImageData.
 *
 * Color conventions: interior strokes magenta, exterior strokes blue,
 * ground truth red, segmentation result green.
 */

import type { StrokeIn } from "./api.js";
import type { Run, SliceDims } from "./rle.js";
import { decodeRle } from "./rle.js";

export type Rgba = [number, number, number, number];

export const COLOR_INTERIOR: Rgba = [230, 0, 230, 255];
export const COLOR_EXTERIOR: Rgba = [40, 80, 255, 255];
export const COLOR_GT: Rgba = [255, 40, 40, 255];
export const COLOR_RESULT: Rgba = [40, 220, 90, 255];

/** Paint RLE runs into an RGBA buffer (rows*cols*4) at the given opacity. */
export function paintRuns(
  buffer: Uint8ClampedArray,
  runs: Run[],
  dims: SliceDims,
  color: Rgba,
  opacity: number,
): void {
  const [rows, cols] = dims;
  if (buffer.length !== rows * cols * 4) {
    throw new Error(`buffer length ${buffer.length} != ${rows}x${cols}x4`);
  }
  const alpha = Math.round(255 * Math.min(Math.max(opacity, 0), 1));
  const mask = decodeRle(runs, dims);
  for (let k = 0; k < mask.length; k++) {
    if (!mask[k]) continue;
    const o = k * 4;
    buffer[o] = color[0];
    buffer[o + 1] = color[1];
    buffer[o + 2] = color[2];
    buffer[o + 3] = alpha;
  }
}

/** Stamp a disc of the brush radius at each stroke point, joining steps. */
export function paintStroke(
  buffer: Uint8ClampedArray,
  stroke: StrokeIn,
  dims: SliceDims,
): void {
  const [rows, cols] = dims;
  const color = stroke.label > 0 ? COLOR_INTERIOR : COLOR_EXTERIOR;
  const r = stroke.brush_radius;
  for (const [pr, pc] of stroke.points) {
    for (let di = -r; di <= r; di++) {
      for (let dj = -r; dj <= r; dj++) {
        if (di * di + dj * dj > r * r) continue;
        const i = pr + di;
        const j = pc + dj;
        if (i < 0 || i >= rows || j < 0 || j >= cols) continue;
        const o = (i * cols + j) * 4;
        buffer[o] = color[0];
        buffer[o + 1] = color[1];
        buffer[o + 2] = color[2];
        buffer[o + 3] = 255;
      }
    }
  }
}

/** Extract the set-pixel flat mask back out of a painted buffer. */
export function bufferToMask(
  buffer: Uint8ClampedArray,
  dims: SliceDims,
): Uint8Array {
  const [rows, cols] = dims;
  const mask = new Uint8Array(rows * cols);
  for (let k = 0; k < mask.length; k++) {
    mask[k] = buffer[k * 4 + 3] !== 0 ? 1 : 0;
  }
  return mask;
}
