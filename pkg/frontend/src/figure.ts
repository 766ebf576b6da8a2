import { readMetricsCsv } from "./csv.js";

export type Metric = "regret" | "violation";

export interface SeriesInput {
  path: string;
  label: string;
}

export interface FigureSpec {
  series: SeriesInput[];
  metric: Metric;
  dualAxis: boolean;
  out: string;
}

export class FigureError extends Error {}

export interface Tick {
  value: number;
  px: number;
}

export interface SeriesModel {
  label: string;
  color: string;
  rightAxis: boolean;
  /** pixel-space polyline, one point per step */
  points: Array<[number, number]>;
}

/** Everything a renderer needs, already laid out in pixel space. */
export interface FigureModel {
  width: number;
  height: number;
  plot: { x: number; y: number; w: number; h: number };
  xTicks: Tick[];
  leftTicks: Tick[];
  rightTicks: Tick[] | null;
  xLabel: string;
  leftLabel: string;
  rightLabel: string | null;
  series: SeriesModel[];
  legend: Array<{ label: string; color: string; rightAxis: boolean }>;
}

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const ATTACK_FREE_RE = /attack[\s_-]?free/i;

/** "Nice" tick values covering [lo, hi], roughly `count` of them. */
export function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const span = hi - lo;
  const rawStep = span / Math.max(1, count - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const ratio = rawStep / mag;
  const step = mag * (ratio < 1.5 ? 1 : ratio < 3 ? 2 : ratio < 7 ? 5 : 10);
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) {
    // snap to the step grid to avoid 0.30000000000000004-style labels
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) {
    return v.toExponential(1).replace("e+", "e");
  }
  // trim trailing zeros from a fixed representation
  return String(Number(v.toPrecision(6)));
}

interface LoadedSeries extends SeriesInput {
  t: number[];
  values: number[];
  rightAxis: boolean;
}

function loadSeries(spec: FigureSpec): LoadedSeries[] {
  if (spec.series.length === 0) {
    throw new FigureError("at least one series is required");
  }
  const loaded: LoadedSeries[] = [];
  for (const s of spec.series) {
    const data = readMetricsCsv(s.path);
    loaded.push({
      ...s,
      t: data.t,
      values: spec.metric === "regret" ? data.regret : data.violation,
      rightAxis: false,
    });
  }
  const horizon = loaded[0].t.length;
  for (const s of loaded) {
    if (s.t.length !== horizon) {
      throw new FigureError(
        `horizon mismatch: ${s.path} has ${s.t.length} steps, ` +
          `${loaded[0].path} has ${horizon}`,
      );
    }
  }
  if (spec.dualAxis) {
    // the attack-free baseline typically dwarfs the resilient runs; it goes
    // on its own right-hand scale, matched by label
    let found = false;
    for (const s of loaded) {
      if (ATTACK_FREE_RE.test(s.label)) {
        s.rightAxis = true;
        found = true;
      }
    }
    if (!found) {
      process.stderr.write(
        "warning: --dual-axis set but no label matches 'attack-free'; " +
          "using a single axis\n",
      );
    }
  }
  return loaded;
}

function extent(values: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const vs of values) {
    for (const v of vs) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo > 0) lo = 0; // anchor cumulative series at zero when positive
  if (hi < 0) hi = 0;
  return [lo, hi];
}

function scale(lo: number, hi: number, pxLo: number, pxHi: number) {
  const span = hi - lo || 1;
  return (v: number) => pxLo + ((v - lo) / span) * (pxHi - pxLo);
}

/** Load all inputs and lay the figure out in pixel space. */
export function buildFigure(spec: FigureSpec): FigureModel {
  const loaded = loadSeries(spec);
  const width = 860;
  const height = 520;
  const hasRight = loaded.some((s) => s.rightAxis);
  const plot = {
    x: 80,
    y: 40,
    w: width - 80 - (hasRight ? 90 : 40),
    h: height - 40 - 110,
  };

  const tMax = Math.max(...loaded[0].t);
  const tMin = Math.min(...loaded[0].t);
  const sx = scale(tMin, tMax, plot.x, plot.x + plot.w);

  const leftSeries = loaded.filter((s) => !s.rightAxis);
  const rightSeries = loaded.filter((s) => s.rightAxis);
  const [llo, lhi] = extent(
    (leftSeries.length > 0 ? leftSeries : loaded).map((s) => s.values),
  );
  const lticks = niceTicks(llo, lhi);
  const syLo = Math.min(llo, lticks[0]);
  const syHi = Math.max(lhi, lticks[lticks.length - 1]);
  const sy = scale(syLo, syHi, plot.y + plot.h, plot.y);

  let syR: ((v: number) => number) | null = null;
  let rticks: number[] = [];
  if (rightSeries.length > 0) {
    const [rlo, rhi] = extent(rightSeries.map((s) => s.values));
    rticks = niceTicks(rlo, rhi);
    syR = scale(
      Math.min(rlo, rticks[0]),
      Math.max(rhi, rticks[rticks.length - 1]),
      plot.y + plot.h,
      plot.y,
    );
  }

  const series: SeriesModel[] = loaded.map((s, k) => {
    const y = s.rightAxis && syR ? syR : sy;
    return {
      label: s.label,
      color: PALETTE[k % PALETTE.length],
      rightAxis: s.rightAxis && syR !== null,
      points: s.t.map((t, i) => [sx(t), y(s.values[i])] as [number, number]),
    };
  });

  const metricName =
    spec.metric === "regret" ? "dynamic regret" : "cumulative violation";
  return {
    width,
    height,
    plot,
    xTicks: niceTicks(tMin, tMax, 7)
      .filter((v) => v >= tMin && v <= tMax)
      .map((v) => ({ value: v, px: sx(v) })),
    leftTicks: lticks.map((v) => ({ value: v, px: sy(v) })),
    rightTicks: syR ? rticks.map((v) => ({ value: v, px: syR(v) })) : null,
    xLabel: "t",
    leftLabel: metricName,
    rightLabel: syR ? `${metricName} (attack-free)` : null,
    series,
    legend: series.map((s) => ({
      label: s.label,
      color: s.color,
      rightAxis: s.rightAxis,
    })),
  };
}
