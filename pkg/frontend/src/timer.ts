/**
 * Per-slice annotation timer with a 10 s idle cutoff.
 *
 * Time accrues to the focused slice only while the operator has been active
 * (pointer or key) within the last IDLE_CUTOFF_MS. Walking away from the
 * screen therefore stops the clock 10 s after the last interaction, and
 * unfocused slices never accrue at all.
 */

export const IDLE_CUTOFF_MS = 10_000;

export class SliceTimer {
  private totals = new Map<number, number>();
  private focusedSlice: number | null = null;
  private segmentStartMs: number | null = null;
  private lastActivityMs = 0;

  /** Focus a slice (switching slices closes the previous accrual segment). */
  focus(slice: number, nowMs: number): void {
    this.settle(nowMs);
    this.focusedSlice = slice;
    this.segmentStartMs = null;
  }

  /** Drop focus entirely (e.g. the tab went hidden). */
  blur(nowMs: number): void {
    this.settle(nowMs);
    this.focusedSlice = null;
    this.segmentStartMs = null;
  }

  /** Record operator activity; opens an accrual segment if none is running. */
  activity(nowMs: number): void {
    if (this.focusedSlice === null) return;
    if (this.segmentStartMs !== null && this.idleAt(nowMs)) {
      this.settle(nowMs);
    }
    if (this.segmentStartMs === null) this.segmentStartMs = nowMs;
    this.lastActivityMs = nowMs;
  }

  /** Accrued seconds for one slice, as of nowMs. */
  secondsFor(slice: number, nowMs: number): number {
    let total = this.totals.get(slice) ?? 0;
    if (this.focusedSlice === slice && this.segmentStartMs !== null) {
      total += this.liveMs(nowMs);
    }
    return total / 1000;
  }

  /** All per-slice totals as of nowMs, keyed by slice index. */
  snapshot(nowMs: number): Map<number, number> {
    const out = new Map<number, number>();
    for (const slice of this.totals.keys()) {
      out.set(slice, this.secondsFor(slice, nowMs));
    }
    if (this.focusedSlice !== null && !out.has(this.focusedSlice)) {
      out.set(this.focusedSlice, this.secondsFor(this.focusedSlice, nowMs));
    }
    return out;
  }

  private idleAt(nowMs: number): boolean {
    return nowMs - this.lastActivityMs > IDLE_CUTOFF_MS;
  }

  /** Milliseconds of the open segment that count as active at nowMs. */
  private liveMs(nowMs: number): number {
    if (this.segmentStartMs === null) return 0;
    const end = this.idleAt(nowMs)
      ? this.lastActivityMs + IDLE_CUTOFF_MS
      : nowMs;
    return Math.max(0, end - this.segmentStartMs);
  }

  /** Close the open segment into the focused slice's total. */
  private settle(nowMs: number): void {
    if (this.focusedSlice !== null && this.segmentStartMs !== null) {
      const prev = this.totals.get(this.focusedSlice) ?? 0;
      this.totals.set(this.focusedSlice, prev + this.liveMs(nowMs));
    }
    this.segmentStartMs = null;
  }
}
