import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { describe, expect, it } from "vitest";

import { CsvError, readSummaryCsv } from "../src/csv.js";
import { renderFigure, renderToFile } from "../src/figures.js";
import { main as cliMain } from "../src/cli.js";

const FIX = path.join(__dirname, "fixtures");

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "plots-"));
}

function spec(kind: "axial-scaling" | "planar-scaling" | "bilinear-trace",
              csv: string, out: string, log = false) {
  return { csvPath: csv, figureKind: kind, outputPath: out, logAxes: log };
}

describe("renderFigure", () => {
  it("axial figure shows points, envelope and floor", () => {
    const svg = renderFigure(
      spec("axial-scaling", path.join(FIX, "axial.csv"), "unused"));
    expect(svg).toContain("<svg");
    expect((svg.match(/<circle/g) ?? []).length).toBe(3); // one mean per size
    expect(svg).toContain("2n*H_n");
    expect(svg).toContain("zeta(2)*n");
    expect(svg).toContain("log-log slope:");
  });

  it("planar figure honors log axes and annotates the summary slope", () => {
    const svg = renderFigure(
      spec("planar-scaling", path.join(FIX, "planar.csv"), "unused", true));
    expect(svg).toContain("n (log)");
    expect(svg).toContain("cost (log)");
    const m = svg.match(/log-log slope: (-?\d+\.\d{4})/);
    expect(m).not.toBeNull();
    const summary = readSummaryCsv(path.join(FIX, "planar.csv.summary.csv"));
    // annotated slope agrees with the bench summarize value to 3 decimals
    expect(Math.abs(Number(m![1]) - summary[0].slope!)).toBeLessThan(5e-4);
  });

  it("bilinear traces render one polyline per run", () => {
    const svg = renderFigure(
      spec("bilinear-trace", path.join(FIX, "bilinear.csv"), "unused"));
    expect((svg.match(/<polyline/g) ?? []).length).toBe(5);
    expect(svg).toContain("sweep");
  });

  it("is byte-stable across invocations", () => {
    for (const [kind, csv] of [
      ["axial-scaling", "axial.csv"],
      ["planar-scaling", "planar.csv"],
      ["bilinear-trace", "bilinear.csv"],
    ] as const) {
      const a = renderFigure(spec(kind, path.join(FIX, csv), "unused"));
      const b = renderFigure(spec(kind, path.join(FIX, csv), "unused"));
      expect(a).toBe(b);
    }
  });

  it("errors on empty data without writing", () => {
    const dir = tmpDir();
    const empty = path.join(dir, "empty.csv");
    const header = fs.readFileSync(path.join(FIX, "axial.csv"), "utf-8")
      .split("\n")[0];
    fs.writeFileSync(empty, header + "\n");
    const out = path.join(dir, "out.svg");
    expect(() => renderToFile(spec("axial-scaling", empty, out))).toThrow(CsvError);
    expect(fs.existsSync(out)).toBe(false);
  });

  it("errors on missing columns before rendering", () => {
    const dir = tmpDir();
    const bad = path.join(dir, "bad.csv");
    fs.writeFileSync(bad, "a,b\n1,2\n");
    expect(() => renderFigure(spec("axial-scaling", bad, "unused")))
      .toThrow(/missing columns/);
  });

  it("errors when traces are absent for the trace figure", () => {
    expect(() => renderFigure(
      spec("bilinear-trace", path.join(FIX, "axial.csv"), "unused")))
      .toThrow(/no rows with a trace/);
  });
});

describe("cli", () => {
  it("renders all three kinds and is byte-stable on disk", () => {
    const dir = tmpDir();
    for (const [kind, csv] of [
      ["axial-scaling", "axial.csv"],
      ["planar-scaling", "planar.csv"],
      ["bilinear-trace", "bilinear.csv"],
    ] as const) {
      const out1 = path.join(dir, `${kind}-1.svg`);
      const out2 = path.join(dir, `${kind}-2.svg`);
      const args = ["render", "--csv", path.join(FIX, csv), "--kind", kind];
      expect(cliMain([...args, "--out", out1, "--log"])).toBe(0);
      expect(cliMain([...args, "--out", out2, "--log"])).toBe(0);
      expect(fs.readFileSync(out1)).toEqual(fs.readFileSync(out2));
      expect(fs.statSync(out1).size).toBeGreaterThan(500);
    }
  });

  it("exit code 1 on usage errors", () => {
    expect(cliMain([])).toBe(1);
    expect(cliMain(["render", "--csv", "x.csv"])).toBe(1);
    expect(cliMain(["render", "--csv", "x.csv", "--kind", "nope",
                    "--out", "y.svg"])).toBe(1);
  });

  it("exit code 2 on data errors", () => {
    expect(cliMain(["render", "--csv", "/does/not/exist.csv",
                    "--kind", "axial-scaling", "--out", "/tmp/x.svg"])).toBe(2);
  });

  it("accepts an explicit summary path", () => {
    const dir = tmpDir();
    const out = path.join(dir, "p.svg");
    expect(cliMain(["render", "--csv", path.join(FIX, "planar.csv"),
                    "--kind", "planar-scaling", "--out", out, "--log",
                    "--summary", path.join(FIX, "planar.csv.summary.csv")]))
      .toBe(0);
    expect(fs.readFileSync(out, "utf-8")).toContain("log-log slope: -0.4814");
  });
});
