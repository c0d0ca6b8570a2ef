/**
 * Per-size aggregation and the envelope/slope fits shown on the figures.
 *
 * The log-log slope formula mirrors the bench CLI's summarize step exactly
 * (least squares of ln(mean cost) on ln(n)), so a locally computed slope
 * agrees with the summary CSV; when a summary file is available the figure
 * re-displays its value instead.
 */

import type { RunRow } from "./csv.js";

export interface SizePoint {
  n: number;
  count: number;
  mean: number;
  se: number;
}

export function groupBySize(rows: RunRow[],
                            value: (r: RunRow) => number | null): SizePoint[] {
  const byN = new Map<number, number[]>();
  for (const row of rows) {
    const v = value(row);
    if (v === null) continue;
    const bucket = byN.get(row.n);
    if (bucket) {
      bucket.push(v);
    } else {
      byN.set(row.n, [v]);
    }
  }
  const points: SizePoint[] = [];
  for (const n of [...byN.keys()].sort((a, b) => a - b)) {
    const vals = byN.get(n)!;
    const mean = vals.reduce((s, v) => s + v, 0) / vals.length;
    let se = 0;
    if (vals.length > 1) {
      const ss = vals.reduce((s, v) => s + (v - mean) * (v - mean), 0);
      se = Math.sqrt(ss / (vals.length - 1)) / Math.sqrt(vals.length);
    }
    points.push({ n, count: vals.length, mean, se });
  }
  return points;
}

/** Least squares slope of ln(mean) vs ln(n); null below two usable sizes. */
export function loglogSlope(points: SizePoint[]): number | null {
  const usable = points.filter((p) => p.mean > 0);
  if (usable.length < 2) return null;
  const xs = usable.map((p) => Math.log(p.n));
  const ys = usable.map((p) => Math.log(p.mean));
  const xbar = xs.reduce((s, v) => s + v, 0) / xs.length;
  const ybar = ys.reduce((s, v) => s + v, 0) / ys.length;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < xs.length; i++) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  return sxy / sxx;
}

/** Least squares through the origin: the constant c minimizing
 *  sum (mean_i - c * shape(n_i))^2. */
export function fitEnvelopeConstant(points: SizePoint[],
                                    shape: (n: number) => number): number {
  let num = 0;
  let den = 0;
  for (const p of points) {
    const e = shape(p.n);
    num += p.mean * e;
    den += e * e;
  }
  return den > 0 ? num / den : 0;
}

export function harmonic(n: number): number {
  let h = 0;
  for (let i = 1; i <= n; i++) h += 1 / i;
  return h;
}

export const ZETA2 = Math.PI * Math.PI / 6;
