#!/usr/bin/env node
/**
 * render --csv FILE --kind KIND --out FILE [--log] [--summary FILE]
 *
 * Exit codes: 0 ok, 1 usage error, 2 data/IO error.
 */

import { CsvError } from "./csv.js";
import { FigureKind, renderToFile } from "./figures.js";

const KINDS: FigureKind[] = ["axial-scaling", "planar-scaling", "bilinear-trace"];

interface Args {
  csv: string;
  kind: FigureKind;
  out: string;
  log: boolean;
  summary?: string;
}

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0 || argv[0] !== "render") {
    throw new UsageError("expected the 'render' command");
  }
  const opts = new Map<string, string>();
  let log = false;
  for (let i = 1; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--log") {
      log = true;
    } else if (a === "--csv" || a === "--kind" || a === "--out" || a === "--summary") {
      const v = argv[++i];
      if (v === undefined) throw new UsageError(`missing value for ${a}`);
      opts.set(a, v);
    } else {
      throw new UsageError(`unknown argument ${a}`);
    }
  }
  const csv = opts.get("--csv");
  const kind = opts.get("--kind") as FigureKind | undefined;
  const out = opts.get("--out");
  if (!csv || !kind || !out) {
    throw new UsageError("--csv, --kind and --out are required");
  }
  if (!KINDS.includes(kind)) {
    throw new UsageError(`--kind must be one of ${KINDS.join(", ")}`);
  }
  return { csv, kind, out, log, summary: opts.get("--summary") };
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    renderToFile({
      csvPath: args.csv,
      figureKind: args.kind,
      outputPath: args.out,
      logAxes: args.log,
      summaryPath: args.summary,
    });
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      console.error("usage: render --csv FILE --kind KIND --out FILE [--log] [--summary FILE]");
      return 1;
    }
    if (err instanceof CsvError) {
      console.error(`data error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

const invokedDirectly = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
