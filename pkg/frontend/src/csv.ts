/**
 * Readers for the bench CSV contract.
 *
 * Run CSV columns:
 *   command,n,d,k,seed,mode,cost,lower_bound,reference_bound,escalations,
 *   converged,status,runtime_ms,phase_cost_1..3,trace
 * Summary CSV columns: n,count,mean,se,min,max,slope
 */

import fs from "node:fs";

export interface RunRow {
  command: string;
  n: number;
  d: number;
  k: number;
  seed: number;
  mode: string;
  cost: number | null;
  lowerBound: number | null;
  referenceBound: number | null;
  converged: boolean;
  status: string;
  trace: number[];
}

export interface SummaryRow {
  n: number;
  count: number;
  mean: number;
  se: number;
  min: number;
  max: number;
  slope: number | null;
}

export class CsvError extends Error {}

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.length > 0);
}

function num(field: string, lineno: number): number {
  const v = Number(field);
  if (field === "" || !Number.isFinite(v)) {
    throw new CsvError(`line ${lineno}: expected a number, got "${field}"`);
  }
  return v;
}

function numOrNull(field: string, lineno: number): number | null {
  return field === "" ? null : num(field, lineno);
}

export function readRunCsv(path: string): RunRow[] {
  if (!fs.existsSync(path)) {
    throw new CsvError(`CSV not found: ${path}`);
  }
  const lines = splitLines(fs.readFileSync(path, "utf-8"));
  if (lines.length === 0) {
    throw new CsvError(`line 1: ${path} is empty`);
  }
  const header = lines[0].split(",");
  const need = ["command", "n", "cost", "lower_bound", "reference_bound",
                "k", "seed", "converged", "status", "trace"];
  const missing = need.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new CsvError(`line 1: missing columns ${missing.join(", ")}`);
  }
  const col = (name: string) => header.indexOf(name);
  const rows: RunRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new CsvError(
        `line ${i + 1}: expected ${header.length} fields, got ${parts.length}`);
    }
    const traceField = parts[col("trace")];
    rows.push({
      command: parts[col("command")],
      n: num(parts[col("n")], i + 1),
      d: num(parts[col("d")], i + 1),
      k: num(parts[col("k")], i + 1),
      seed: num(parts[col("seed")], i + 1),
      mode: parts[col("mode")],
      cost: numOrNull(parts[col("cost")], i + 1),
      lowerBound: numOrNull(parts[col("lower_bound")], i + 1),
      referenceBound: numOrNull(parts[col("reference_bound")], i + 1),
      converged: parts[col("converged")] === "true",
      status: parts[col("status")],
      trace: traceField === "" ? [] : traceField.split(";").map((v) => num(v, i + 1)),
    });
  }
  return rows;
}

export function readSummaryCsv(path: string): SummaryRow[] {
  const lines = splitLines(fs.readFileSync(path, "utf-8"));
  if (lines.length === 0) {
    throw new CsvError(`line 1: ${path} is empty`);
  }
  const header = lines[0].split(",");
  const need = ["n", "count", "mean", "se", "min", "max", "slope"];
  const missing = need.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new CsvError(`line 1: missing columns ${missing.join(", ")}`);
  }
  const col = (name: string) => header.indexOf(name);
  const rows: SummaryRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new CsvError(
        `line ${i + 1}: expected ${header.length} fields, got ${parts.length}`);
    }
    rows.push({
      n: num(parts[col("n")], i + 1),
      count: num(parts[col("count")], i + 1),
      mean: num(parts[col("mean")], i + 1),
      se: num(parts[col("se")], i + 1),
      min: num(parts[col("min")], i + 1),
      max: num(parts[col("max")], i + 1),
      slope: numOrNull(parts[col("slope")], i + 1),
    });
  }
  return rows;
}
