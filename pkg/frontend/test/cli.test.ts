import crypto from "node:crypto";
import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { crossCheck, parseSeriesArg, render } from "../src/cli.js";
import type { FigureSpec } from "../src/figure.js";

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "fixtures");

const metricsOf = (name: string) => path.join(FIXTURES, name, "metrics.csv");

function sha256(file: string): string {
  return crypto.createHash("sha256").update(fs.readFileSync(file)).digest("hex");
}

function figSpec(out: string): FigureSpec {
  return {
    series: [
      { path: metricsOf("ctm"), label: "CTM" },
      { path: metricsOf("ios"), label: "IOS" },
      { path: metricsOf("scc"), label: "SCC" },
      { path: metricsOf("scc_quantile"), label: "SCC (quantile)" },
      { path: metricsOf("attack_free"), label: "attack-free" },
    ],
    metric: "violation",
    dualAxis: true,
    out,
  };
}

describe("parseSeriesArg", () => {
  it("splits on the last colon", () => {
    expect(parseSeriesArg("out/run/metrics.csv:ctm rule")).toEqual({
      path: "out/run/metrics.csv",
      label: "ctm rule",
    });
  });

  it("falls back to the run directory name", () => {
    expect(parseSeriesArg("out/ctm/metrics.csv").label).toBe("ctm");
  });
});

describe("render", () => {
  it("writes a PNG and leaves every input byte-identical", () => {
    const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "plotcli-"));
    const out = path.join(tmp, "fig.png");
    const spec = figSpec(out);
    const inputs = spec.series.flatMap((s) => [
      s.path,
      path.join(path.dirname(s.path), "trace.csv"),
    ]);
    const before = inputs.map(sha256);
    render(spec);
    const after = inputs.map(sha256);
    expect(after).toEqual(before);
    const buf = fs.readFileSync(out);
    // PNG signature
    expect(Array.from(buf.subarray(0, 4))).toEqual([0x89, 0x50, 0x4e, 0x47]);
    expect(buf.length).toBeGreaterThan(1000);
  });

  it("writes an SVG with five series and a right-hand tick column", () => {
    const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "plotcli-"));
    const out = path.join(tmp, "fig.svg");
    render(figSpec(out));
    const svg = fs.readFileSync(out, "utf8");
    expect((svg.match(/<polyline/g) ?? []).length).toBe(5);
    expect(svg).toContain("attack-free");
    expect(svg).toContain('text-anchor="start"'); // right-axis tick labels
  });

  it("renders a single-axis regret figure too", () => {
    const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "plotcli-"));
    const out = path.join(tmp, "regret.svg");
    render({
      series: [{ path: metricsOf("ctm"), label: "ctm" }],
      metric: "regret",
      dualAxis: false,
      out,
    });
    expect(fs.existsSync(out)).toBe(true);
  });
});

describe("crossCheck", () => {
  it("is silent on untouched fixture runs", () => {
    const paths = ["ctm", "ios", "scc", "scc_quantile", "attack_free"].map(
      metricsOf,
    );
    expect(crossCheck(paths)).toEqual([]);
  });

  it("warns when metrics.csv does not match its trace", () => {
    const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "plotcli-"));
    for (const f of ["metrics.csv", "trace.csv"]) {
      fs.copyFileSync(path.join(FIXTURES, "ctm", f), path.join(tmp, f));
    }
    const target = path.join(tmp, "metrics.csv");
    const lines = fs.readFileSync(target, "utf8").trim().split(/\r?\n/);
    const cols = lines[1].split(",");
    cols[2] = String(Number(cols[2]) + 1e-6);
    lines[1] = cols.join(",");
    fs.writeFileSync(target, lines.join("\n") + "\n");
    const warnings = crossCheck([target]);
    expect(warnings.length).toBe(1);
    expect(warnings[0]).toContain("disagrees");
  });

  it("skips runs without a trace.csv", () => {
    const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "plotcli-"));
    const lone = path.join(tmp, "metrics.csv");
    fs.copyFileSync(metricsOf("ctm"), lone);
    expect(crossCheck([lone])).toEqual([]);
  });
});
