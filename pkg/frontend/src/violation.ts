import type { TraceData } from "./csv.js";

/**
 * Recompute the cumulative constraint violation from a trace: the absolute
 * value of the running sum of the per-step residual column. This mirrors
 * what the simulator writes into metrics.csv and is used purely as a
 * cross-check that the two files belong together.
 */
export function violationFromTrace(trace: TraceData): number[] {
  const out: number[] = [];
  let acc = 0;
  for (const r of trace.residual) {
    acc += r;
    out.push(Math.abs(acc));
  }
  return out;
}

/** Largest absolute difference between two equal-length series. */
export function maxAbsDiff(a: number[], b: number[]): number {
  if (a.length !== b.length) {
    return Infinity;
  }
  let worst = 0;
  for (let i = 0; i < a.length; i++) {
    worst = Math.max(worst, Math.abs(a[i] - b[i]));
  }
  return worst;
}
