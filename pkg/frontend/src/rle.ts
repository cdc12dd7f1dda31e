/**
 * Run-length codec for slice masks, matching the server's wire format:
 * the M x N slice is flattened row-major and set pixels are listed as
 * maximal [start, length] runs with strictly increasing starts.
 */

export type Run = [start: number, length: number];
export type SliceDims = [rows: number, cols: number];

/** Decode runs into a flat 0/1 mask of rows*cols bytes. */
export function decodeRle(runs: Run[], dims: SliceDims): Uint8Array {
  const [rows, cols] = dims;
  if (rows < 1 || cols < 1) throw new Error(`bad dims ${rows}x${cols}`);
  const mask = new Uint8Array(rows * cols);
  let prevEnd = -1;
  for (const run of runs) {
    const [start, length] = run;
    if (!Number.isInteger(start) || !Number.isInteger(length) || length < 1) {
      throw new Error(`bad run [${start}, ${length}]`);
    }
    if (start < 0 || start + length > mask.length) {
      throw new Error(`run [${start}, ${length}] outside mask`);
    }
    if (start <= prevEnd) {
      throw new Error(`run [${start}, ${length}] overlaps or is out of order`);
    }
    mask.fill(1, start, start + length);
    prevEnd = start + length - 1;
  }
  return mask;
}

/** Encode a flat 0/1 mask (row-major over dims) as maximal runs. */
export function encodeRle(mask: ArrayLike<number>, dims: SliceDims): Run[] {
  const [rows, cols] = dims;
  if (mask.length !== rows * cols) {
    throw new Error(`mask length ${mask.length} != ${rows}x${cols}`);
  }
  const runs: Run[] = [];
  let start = -1;
  for (let k = 0; k <= mask.length; k++) {
    const set = k < mask.length && mask[k] !== 0;
    if (set && start < 0) start = k;
    if (!set && start >= 0) {
      runs.push([start, k - start]);
      start = -1;
    }
  }
  return runs;
}

/** Count of set pixels across runs (no decode needed). */
export function runArea(runs: Run[]): number {
  let total = 0;
  for (const [, length] of runs) total += length;
  return total;
}
