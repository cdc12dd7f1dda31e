import { describe, expect, it } from "vitest";

import { clampToSlice, downsamplePath, finishStroke } from "../src/strokes.js";
import type { StrokeDraft } from "../src/strokes.js";

describe("stroke capture", () => {
  it("keeps at most one point per pixel step", () => {
    const raw: [number, number][] = [
      [5.1, 5.2],
      [5.3, 5.1], // same pixel after rounding
      [5.4, 6.0],
      [5.4, 6.4], // same pixel again
      [7.0, 8.0],
    ];
    expect(downsamplePath(raw)).toEqual([
      [5, 5],
      [5, 6],
      [7, 8],
    ]);
  });

  it("turns a click without drag into a single-point stroke", () => {
    const draft: StrokeDraft = {
      label: 1,
      sliceZ: 4,
      brushRadius: 0,
      path: [
        [10.2, 11.7],
        [10.2, 11.7],
      ],
      startedAtMs: 1000,
    };
    const posted = finishStroke(draft, 64, 64, 1450);
    expect(posted).toEqual({
      label: 1,
      slice_z: 4,
      points: [[10, 12]],
      brush_radius: 0,
      elapsed_ms: 450,
    });
  });

  it("clamps drags that leave the canvas", () => {
    expect(
      clampToSlice(
        [
          [-3, 5],
          [70, 63],
          [10, -1],
        ],
        64,
        64,
      ),
    ).toEqual([
      [0, 5],
      [63, 63],
      [10, 0],
    ]);
  });

  it("returns null for an empty path and never negative elapsed", () => {
    const empty: StrokeDraft = {
      label: -1,
      sliceZ: 0,
      brushRadius: 1,
      path: [],
      startedAtMs: 500,
    };
    expect(finishStroke(empty, 64, 64, 600)).toBeNull();
    const clockSkew: StrokeDraft = { ...empty, path: [[1, 1]] };
    expect(finishStroke(clockSkew, 64, 64, 400)?.elapsed_ms).toBe(0);
  });
});
