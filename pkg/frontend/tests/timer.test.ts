import { describe, expect, it } from "vitest";

import { IDLE_CUTOFF_MS, SliceTimer } from "../src/timer.js";

const SEC = 1000;

describe("slice timer", () => {
  it("accrues time on the focused slice while active", () => {
    const t = new SliceTimer();
    t.focus(3, 0);
    t.activity(0);
    t.activity(4 * SEC);
    expect(t.secondsFor(3, 5 * SEC)).toBeCloseTo(5);
    expect(t.secondsFor(2, 5 * SEC)).toBe(0);
  });

  it("stops the clock 10 s after the last interaction", () => {
    const t = new SliceTimer();
    t.focus(0, 0);
    t.activity(0);
    // no further input: the segment is capped at last activity + cutoff
    expect(t.secondsFor(0, 60 * SEC)).toBeCloseTo(IDLE_CUTOFF_MS / SEC);
    expect(t.secondsFor(0, 600 * SEC)).toBeCloseTo(IDLE_CUTOFF_MS / SEC);
  });

  it("resumes a fresh segment after an idle gap", () => {
    const t = new SliceTimer();
    t.focus(1, 0);
    t.activity(0);
    t.activity(100 * SEC); // returned from a long pause
    t.activity(103 * SEC);
    // 10 s before the gap + 4 s after (103..104 still live)
    expect(t.secondsFor(1, 104 * SEC)).toBeCloseTo(14);
  });

  it("does not accrue without focus or before any activity", () => {
    const t = new SliceTimer();
    t.activity(0); // ignored: nothing focused
    expect(t.secondsFor(0, 5 * SEC)).toBe(0);
    t.focus(0, 6 * SEC);
    expect(t.secondsFor(0, 9 * SEC)).toBe(0); // focused but idle hands
  });

  it("splits time across slices on focus change", () => {
    const t = new SliceTimer();
    t.focus(0, 0);
    t.activity(0);
    t.activity(3 * SEC);
    t.focus(1, 4 * SEC); // closes slice 0 at 4 s
    t.activity(4 * SEC);
    t.activity(6 * SEC);
    const snap = t.snapshot(7 * SEC);
    expect(snap.get(0)).toBeCloseTo(4);
    expect(snap.get(1)).toBeCloseTo(3);
  });

  it("blur freezes accrual until refocus", () => {
    const t = new SliceTimer();
    t.focus(2, 0);
    t.activity(0);
    t.blur(2 * SEC);
    expect(t.secondsFor(2, 50 * SEC)).toBeCloseTo(2);
    t.focus(2, 60 * SEC);
    t.activity(60 * SEC);
    expect(t.secondsFor(2, 61 * SEC)).toBeCloseTo(3);
  });
});
