/**
 * The three figure kinds rendered from bench CSVs.
 *
 * - axial-scaling: per-size mean cost with standard-error bars against the
 *   2n*H_n expectation envelope and the zeta(2)*n floor.
 * - planar-scaling: per-size mean cost (log-log by default) against the
 *   2^k * n^(theta-1) * ln n envelope and the 1/n floor, annotated with the
 *   log-log slope of the means.
 * - bilinear-trace: the per-run sweep values of the alternating heuristic.
 *
 * Envelope shapes are fixed; their constants are fitted to the data by
 * least squares and printed in the legend.  Output is deterministic SVG.
 */

import fs from "node:fs";
import path from "node:path";

import { CsvError, readRunCsv, readSummaryCsv, RunRow } from "./csv.js";
import { fitEnvelopeConstant, groupBySize, harmonic, loglogSlope,
         SizePoint, ZETA2 } from "./stats.js";
import { drawAxes, fmt, HEIGHT, linearScale, logScale, MARGIN, Scale,
         SvgDoc, WIDTH } from "./svg.js";

export type FigureKind = "axial-scaling" | "planar-scaling" | "bilinear-trace";

export interface PlotSpec {
  csvPath: string;
  figureKind: FigureKind;
  outputPath: string;
  logAxes: boolean;
  /** Optional bench summary CSV; its slope is re-displayed when present. */
  summaryPath?: string;
}

const POINT_COLOR = "#1f5fbf";
const ENVELOPE_COLOR = "#c23b22";
const FLOOR_COLOR = "#2e8b57";
const TRACE_COLORS = ["#1f5fbf", "#c23b22", "#2e8b57", "#8a2be2", "#b8860b",
                      "#008b8b", "#cc3366", "#556b2f"];

function plotArea() {
  return {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

function makeScale(lo: number, hi: number, pxLo: number, pxHi: number,
                   log: boolean): Scale {
  if (log) {
    return logScale(lo, hi, pxLo, pxHi);
  }
  return linearScale(lo, hi, pxLo, pxHi);
}

function drawMeanPoints(doc: SvgDoc, points: SizePoint[], xs: Scale, ys: Scale): void {
  for (const p of points) {
    const px = xs.toPx(p.n);
    if (p.se > 0) {
      const lo = ys.toPx(Math.max(p.mean - p.se, 1e-300));
      const hi = ys.toPx(p.mean + p.se);
      doc.line(px, lo, px, hi, POINT_COLOR, 1);
      doc.line(px - 4, lo, px + 4, lo, POINT_COLOR, 1);
      doc.line(px - 4, hi, px + 4, hi, POINT_COLOR, 1);
    }
    doc.circle(px, ys.toPx(p.mean), 3.5, POINT_COLOR);
  }
}

function curvePoints(nLo: number, nHi: number, log: boolean,
                     f: (n: number) => number): Array<[number, number]> {
  const steps = 96;
  const pts: Array<[number, number]> = [];
  for (let i = 0; i <= steps; i++) {
    const frac = i / steps;
    const n = log
      ? nLo * Math.pow(nHi / nLo, frac)
      : nLo + (nHi - nLo) * frac;
    pts.push([n, f(n)]);
  }
  return pts;
}

function sizeRange(points: SizePoint[]): [number, number] {
  const ns = points.map((p) => p.n);
  return [Math.min(...ns), Math.max(...ns)];
}

interface ScalingConfig {
  title: string;
  envelopeShape: (n: number) => number;
  envelopeLabel: string;
  floorShape: (n: number) => number;
  floorLabel: string;
  slope: number | null;
}

function renderScaling(rows: RunRow[], cfg: ScalingConfig,
                       logAxes: boolean): string {
  const points = groupBySize(rows, (r) => r.cost);
  if (points.length === 0) {
    throw new CsvError("no rows with a cost to plot");
  }
  const lbPoints = groupBySize(rows, (r) => r.lowerBound);
  const cEnv = fitEnvelopeConstant(points, cfg.envelopeShape);
  const cFloor = lbPoints.length > 0
    ? fitEnvelopeConstant(lbPoints, cfg.floorShape)
    : 1.0;
  const [nLo, nHi] = sizeRange(points);
  const envelope = (n: number) => cEnv * cfg.envelopeShape(n);
  const floor = (n: number) => cFloor * cfg.floorShape(n);

  const yCandidates = [
    ...points.map((p) => p.mean + p.se),
    ...points.map((p) => Math.max(p.mean - p.se, p.mean * 0.5)),
    envelope(nLo), envelope(nHi), floor(nLo), floor(nHi),
  ].filter((v) => Number.isFinite(v) && (!logAxes || v > 0));
  const yLo = logAxes ? Math.min(...yCandidates) / 1.5 : 0;
  const yHi = Math.max(...yCandidates) * (logAxes ? 1.5 : 1.08);

  const area = plotArea();
  const xPad = logAxes ? 1.15 : 0.06 * (nHi - nLo || 1);
  const xs = makeScale(logAxes ? nLo / xPad : nLo - xPad,
                       logAxes ? nHi * xPad : nHi + xPad,
                       area.x0, area.x1, logAxes);
  const ys = makeScale(yLo || yHi / 1000, yHi, area.y0, area.y1, logAxes);

  const doc = new SvgDoc();
  drawAxes(doc, {
    title: cfg.title,
    xLabel: logAxes ? "n (log)" : "n",
    yLabel: logAxes ? "cost (log)" : "cost",
    xScale: xs,
    yScale: ys,
  });
  doc.polyline(curvePoints(nLo, nHi, logAxes, cfg.envelopeShape)
    .map(([n, e]) => [xs.toPx(n), ys.toPx(Math.max(cEnv * e, yLo || 1e-300))]),
    ENVELOPE_COLOR, 1.5, "6 3");
  if (lbPoints.length > 0) {
    doc.polyline(curvePoints(nLo, nHi, logAxes, cfg.floorShape)
      .map(([n, e]) => [xs.toPx(n), ys.toPx(Math.max(cFloor * e, yLo || 1e-300))]),
      FLOOR_COLOR, 1.5, "2 3");
  }
  drawMeanPoints(doc, points, xs, ys);

  const lx = area.x0 + 10;
  let ly = area.y1 + 14;
  doc.text(lx, ly, `mean cost +/- SE (${points.length} sizes)`, 11, "start", POINT_COLOR);
  ly += 15;
  doc.text(lx, ly, `envelope ${fmt(cEnv)} * ${cfg.envelopeLabel}`, 11, "start", ENVELOPE_COLOR);
  if (lbPoints.length > 0) {
    ly += 15;
    doc.text(lx, ly, `floor ${fmt(cFloor)} * ${cfg.floorLabel}`, 11, "start", FLOOR_COLOR);
  }
  if (cfg.slope !== null) {
    ly += 15;
    doc.text(lx, ly, `log-log slope: ${cfg.slope.toFixed(4)}`, 11, "start", "#222222");
  }
  return doc.render();
}

function renderBilinearTrace(rows: RunRow[]): string {
  const traced = rows.filter((r) => r.trace.length > 0);
  if (traced.length === 0) {
    throw new CsvError("no rows with a trace to plot");
  }
  const maxLen = Math.max(...traced.map((r) => r.trace.length));
  const vals = traced.flatMap((r) => r.trace);
  const yHi = Math.max(...vals) * 1.08;
  const area = plotArea();
  const xs = linearScale(0, Math.max(maxLen - 1, 1), area.x0, area.x1);
  const ys = linearScale(0, yHi, area.y0, area.y1);
  const doc = new SvgDoc();
  drawAxes(doc, {
    title: "alternating bilinear heuristic: sweep traces",
    xLabel: "sweep",
    yLabel: "objective",
    xScale: xs,
    yScale: ys,
  });
  traced.forEach((row, i) => {
    const color = TRACE_COLORS[i % TRACE_COLORS.length];
    doc.polyline(row.trace.map((v, s) => [xs.toPx(s), ys.toPx(v)]), color, 1.25);
    doc.circle(xs.toPx(row.trace.length - 1),
               ys.toPx(row.trace[row.trace.length - 1]), 2.5, color);
  });
  doc.text(area.x0 + 10, area.y1 + 14,
           `${traced.length} runs, n=${[...new Set(traced.map((r) => r.n))].join(",")}`,
           11, "start", "#222222");
  return doc.render();
}

function resolveSlope(spec: PlotSpec, rows: RunRow[]): number | null {
  const candidate = spec.summaryPath ?? `${spec.csvPath}.summary.csv`;
  if (fs.existsSync(candidate)) {
    const summary = readSummaryCsv(candidate);
    if (summary.length > 0) {
      return summary[0].slope;
    }
  }
  // fallback: same least-squares formula as the bench summarize step
  return loglogSlope(groupBySize(rows, (r) => r.cost));
}

export function renderFigure(spec: PlotSpec): string {
  const rows = readRunCsv(spec.csvPath);
  if (rows.length === 0) {
    throw new CsvError("CSV has a header but no data rows");
  }
  switch (spec.figureKind) {
    case "axial-scaling":
      return renderScaling(rows, {
        title: "axial greedy: mean cost vs n",
        envelopeShape: (n) => 2 * n * harmonic(n),
        envelopeLabel: "2n*H_n",
        floorShape: (n) => ZETA2 * n,
        floorLabel: "zeta(2)*n",
        slope: resolveSlope(spec, rows),
      }, spec.logAxes);
    case "planar-scaling": {
      const k = rows[0].k;
      const theta = 1 / (Math.pow(2, k + 1) - 1);
      return renderScaling(rows, {
        title: `planar heuristic (depth ${k}): mean cost vs n`,
        envelopeShape: (n) => Math.pow(2, k) * Math.pow(n, theta - 1) * Math.log(n),
        envelopeLabel: `2^k*n^(${fmt(theta - 1)})*ln n`,
        floorShape: (n) => 1 / n,
        floorLabel: "1/n",
        slope: resolveSlope(spec, rows),
      }, spec.logAxes);
    }
    case "bilinear-trace":
      return renderBilinearTrace(rows);
    default:
      throw new CsvError(`unknown figure kind: ${spec.figureKind as string}`);
  }
}

/** Render and write; the file is only created after rendering succeeded. */
export function renderToFile(spec: PlotSpec): void {
  const svg = renderFigure(spec);
  const dir = path.dirname(spec.outputPath);
  if (dir && !fs.existsSync(dir)) {
    throw new CsvError(`output directory does not exist: ${dir}`);
  }
  fs.writeFileSync(spec.outputPath, svg, "utf-8");
}
