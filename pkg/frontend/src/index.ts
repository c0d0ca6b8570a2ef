export { readRunCsv, readSummaryCsv, CsvError } from "./csv.js";
export type { RunRow, SummaryRow } from "./csv.js";
export { groupBySize, loglogSlope, fitEnvelopeConstant, harmonic, ZETA2 } from "./stats.js";
export type { SizePoint } from "./stats.js";
export { renderFigure, renderToFile } from "./figures.js";
export type { FigureKind, PlotSpec } from "./figures.js";
export { main as cliMain, parseArgs, UsageError } from "./cli.js";
