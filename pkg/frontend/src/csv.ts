import fs from "node:fs";
import Papa from "papaparse";

export interface MetricsSeries {
  t: number[];
  regret: number[];
  violation: number[];
}

export interface TraceData {
  t: number[];
  residual: number[];
}

export class CsvError extends Error {}

function parseRows(path: string): Record<string, string>[] {
  let text: string;
  try {
    text = fs.readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new CsvError(`${path}: ${e.message} (row ${e.row})`);
  }
  return parsed.data;
}

function numColumn(
  rows: Record<string, string>[],
  col: string,
  path: string,
): number[] {
  const out: number[] = [];
  for (const row of rows) {
    const raw = row[col];
    if (raw === undefined) {
      throw new CsvError(`${path}: missing column '${col}'`);
    }
    const v = Number(raw);
    if (!Number.isFinite(v)) {
      throw new CsvError(`${path}: non-numeric value '${raw}' in '${col}'`);
    }
    out.push(v);
  }
  return out;
}

/** Read a metrics.csv (t, cumulative_regret, cumulative_violation). */
export function readMetricsCsv(path: string): MetricsSeries {
  const rows = parseRows(path);
  if (rows.length === 0) {
    throw new CsvError(`${path}: empty series`);
  }
  return {
    t: numColumn(rows, "t", path),
    regret: numColumn(rows, "cumulative_regret", path),
    violation: numColumn(rows, "cumulative_violation", path),
  };
}

/** Read the columns of trace.csv needed for the violation cross-check. */
export function readTraceCsv(path: string): TraceData {
  const rows = parseRows(path);
  if (rows.length === 0) {
    throw new CsvError(`${path}: empty series`);
  }
  return {
    t: numColumn(rows, "t", path),
    residual: numColumn(rows, "residual", path),
  };
}
