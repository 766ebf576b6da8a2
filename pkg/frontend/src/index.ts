export { CsvError, readMetricsCsv, readTraceCsv } from "./csv.js";
export {
  buildFigure,
  FigureError,
  formatTick,
  niceTicks,
} from "./figure.js";
export type { FigureModel, FigureSpec, Metric } from "./figure.js";
export { renderPng } from "./raster.js";
export { renderSvg } from "./svg.js";
export { maxAbsDiff, violationFromTrace } from "./violation.js";
export { crossCheck, parseSeriesArg, render } from "./cli.js";
