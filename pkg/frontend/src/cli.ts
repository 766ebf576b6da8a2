#!/usr/bin/env node
import fs from "node:fs";
import path from "node:path";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { CsvError, readMetricsCsv, readTraceCsv } from "./csv.js";
import { buildFigure, FigureError, type FigureSpec, type Metric } from "./figure.js";
import { renderPng } from "./raster.js";
import { renderSvg } from "./svg.js";
import { maxAbsDiff, violationFromTrace } from "./violation.js";

export function parseSeriesArg(arg: string): { path: string; label: string } {
  // "path/to/metrics.csv:label"; the label may be omitted, in which case
  // the run directory name is used
  const k = arg.lastIndexOf(":");
  if (k > 1) {
    return { path: arg.slice(0, k), label: arg.slice(k + 1) };
  }
  const dir = path.basename(path.dirname(path.resolve(arg)));
  return { path: arg, label: dir || path.basename(arg) };
}

/**
 * Compare each metrics.csv against a recomputation from the sibling
 * trace.csv, when one exists. Returns warning strings; a mismatch beyond
 * 1e-9 means the two files do not belong to the same run.
 */
export function crossCheck(seriesPaths: string[]): string[] {
  const warnings: string[] = [];
  for (const p of seriesPaths) {
    const tracePath = path.join(path.dirname(p), "trace.csv");
    if (!fs.existsSync(tracePath)) continue;
    const metrics = readMetricsCsv(p);
    const recomputed = violationFromTrace(readTraceCsv(tracePath));
    const gap = maxAbsDiff(metrics.violation, recomputed);
    if (!(gap <= 1e-9)) {
      warnings.push(
        `${p}: cumulative_violation disagrees with ${tracePath} ` +
          `(max gap ${gap})`,
      );
    }
  }
  return warnings;
}

export function render(spec: FigureSpec): void {
  const model = buildFigure(spec);
  if (spec.out.toLowerCase().endsWith(".svg")) {
    fs.writeFileSync(spec.out, renderSvg(model));
  } else {
    fs.writeFileSync(spec.out, renderPng(model));
  }
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage(
      "$0 --metric {regret|violation} [--dual-axis] --out fig.png " +
        "<metrics.csv:label>...",
    )
    .option("metric", {
      choices: ["regret", "violation"] as const,
      demandOption: true,
      describe: "which metrics.csv column to plot",
    })
    .option("dual-axis", {
      type: "boolean",
      default: false,
      describe: "put the attack-free series on a right-hand axis",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output image path (.png or .svg)",
    })
    .demandCommand(1, "at least one metrics.csv is required")
    .strict()
    .exitProcess(false)
    .parseSync();

  const spec: FigureSpec = {
    series: (args._ as string[]).map((a) => parseSeriesArg(String(a))),
    metric: args.metric as Metric,
    dualAxis: args["dual-axis"] as boolean,
    out: args.out,
  };
  try {
    for (const warning of crossCheck(spec.series.map((s) => s.path))) {
      process.stderr.write(`warning: ${warning}\n`);
    }
    render(spec);
  } catch (err) {
    if (err instanceof CsvError || err instanceof FigureError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
  process.stderr.write(`wrote ${spec.out}\n`);
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(hideBin(process.argv)));
}
