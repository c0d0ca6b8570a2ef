"""Experiment driver: seeded sweeps, solver dispatch, CSV + manifest output.

Replicate r of a sweep always uses seed = base_seed + r, and rows are
written in (n, seed) order, so identical configs produce byte-identical
CSVs apart from the runtime_ms column.  Floats are printed with 12
significant digits.  The CSV schema (one header row, then one row per
run) is the stable contract for the plotting frontend:

    command,n,d,k,seed,mode,cost,lower_bound,reference_bound,escalations,
    converged,status,runtime_ms,phase_cost_1,phase_cost_2,phase_cost_3,trace

phase_cost_1..3 hold the planar heuristic's per-phase selection costs and
are empty for other commands; trace holds the bilinear sweep values
(semicolon separated) and is empty elsewhere.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, axial, bilinear, instance, planar

COMMANDS = ("solve-axial", "solve-planar", "solve-bilinear", "oracle", "bounds", "sweep")

CSV_COLUMNS = ["command", "n", "d", "k", "seed", "mode", "cost", "lower_bound",
               "reference_bound", "escalations", "converged", "status",
               "runtime_ms", "phase_cost_1", "phase_cost_2", "phase_cost_3",
               "trace"]

SUMMARY_COLUMNS = ["n", "count", "mean", "se", "min", "max", "slope"]


class UsageError(Exception):
    """Bad command line or config; exits with status 1."""


class CsvFormatError(Exception):
    """Malformed CSV input; message carries the offending line number."""


@dataclass
class ExperimentConfig:
    command: str
    n_list: list
    d: int = 3
    k: int = 1
    reps: int = 1
    base_seed: int = 1
    mode: str = "empirical"
    max_escalations: int = planar.DEFAULT_MAX_ESCALATIONS
    out_path: str = None
    time_guard_secs: float = None

    def validate(self):
        if self.command not in COMMANDS or self.command == "sweep":
            raise UsageError(f"unknown or unresolved command {self.command!r}")
        if not self.n_list:
            raise UsageError("n_list must be nonempty")
        if any(n < 1 for n in self.n_list):
            raise UsageError("all sizes must be positive")
        if self.reps < 1:
            raise UsageError("reps must be >= 1")
        if self.mode not in ("empirical", "refresh"):
            raise UsageError(f"mode must be empirical or refresh, got {self.mode!r}")
        if self.command == "bounds":
            if not 2 <= self.d <= 5:
                raise UsageError("bounds supports dimensions 2..5")
        elif self.d != 3:
            raise UsageError(f"{self.command} requires d=3")


@dataclass
class RunRecord:
    command: str
    n: int
    d: int
    k: int
    seed: int
    mode: str
    cost: float = None
    lower_bound: float = None
    reference_bound: float = None
    escalations: int = 0
    converged: bool = True
    status: str = "ok"
    runtime_ms: float = 0.0
    phase_costs: list = field(default_factory=list)
    trace: list = field(default_factory=list)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "%.12g" % x
    return str(x)


def _planar_envelope(n: int, k: int) -> float:
    theta = 1.0 / (2 ** (k + 1) - 1)
    return (2 ** k) * n ** (theta - 1.0) * math.log(n)


def _run_one(config: ExperimentConfig, n: int, seed: int) -> RunRecord:
    rec = RunRecord(command=config.command, n=n, d=config.d, k=config.k,
                    seed=seed, mode=config.mode)
    deadline = None
    if config.time_guard_secs is not None:
        deadline = time.monotonic() + config.time_guard_secs
    start = time.perf_counter()

    if config.command == "bounds":
        rec.lower_bound = planar.lower_bound_rowmin_streaming(n, config.d, seed)
    elif config.command == "solve-axial":
        t = instance.generate(n, 3, seed)
        sol = axial.greedy_axial(t)
        rec.cost = sol.total_cost
        rec.lower_bound = axial.axial_lower_bound(t)
        rec.reference_bound = axial.dfm_bound(n)
    elif config.command == "solve-bilinear":
        t = instance.generate(n, 3, seed)
        res = bilinear.bilinear_heuristic(t)
        rec.cost = res.factors.value
        rec.lower_bound = planar.lower_bound_rowmin(t)
        rec.converged = res.converged
        rec.trace = list(res.trace)
        if not res.converged:
            rec.status = "non-converged"
    elif config.command == "solve-planar":
        t = instance.generate(n, 3, seed)
        rec.lower_bound = planar.lower_bound_rowmin(t)
        rec.reference_bound = _planar_envelope(n, config.k)
        if n < 8:
            # below the schedule guard the driver answers exactly instead
            rec.cost = planar.exact_planar(t).cost
        else:
            report = planar.bdapta(t, config.k, mode=config.mode,
                                   max_escalations=config.max_escalations,
                                   deadline=deadline)
            rec.cost = report.true_cost
            rec.escalations = report.escalations
            rec.converged = report.complete
            rec.phase_costs = list(report.phase_costs)
            if report.timed_out:
                rec.status = "timeout"
            elif not report.complete:
                rec.status = "degraded"
    elif config.command == "oracle":
        if n > planar.EXACT_MAX_N:
            raise UsageError(f"oracle requires n <= {planar.EXACT_MAX_N}")
        t = instance.generate(n, 3, seed)
        rec.lower_bound = planar.lower_bound_rowmin(t)
        report = planar.bdapta(t, config.k, mode=config.mode,
                               max_escalations=config.max_escalations,
                               deadline=deadline)
        rec.cost = report.true_cost
        rec.escalations = report.escalations
        rec.converged = report.complete
        rec.phase_costs = list(report.phase_costs)
        if not report.complete:
            rec.status = "degraded"
        # regenerate: bdapta in refresh mode rewrites the working values
        rec.reference_bound = planar.exact_planar(instance.generate(n, 3, seed)).cost
    else:
        raise UsageError(f"unknown command {config.command!r}")

    rec.runtime_ms = (time.perf_counter() - start) * 1000.0
    if config.time_guard_secs is not None and rec.runtime_ms > config.time_guard_secs * 1000.0:
        rec.status = "timeout"
    if rec.cost is not None and rec.lower_bound is not None and rec.converged:
        assert rec.cost >= rec.lower_bound - 1e-9, \
            f"solution cost {rec.cost} below lower bound {rec.lower_bound}"
    return rec


def run(config: ExperimentConfig) -> list:
    """Execute reps x |n_list| runs; write CSV + manifest when out_path set."""
    config.validate()
    wall_start = time.perf_counter()
    records = []
    for n in sorted(config.n_list):
        for r in range(config.reps):
            records.append(_run_one(config, n, config.base_seed + r))
    records.sort(key=lambda rec: (rec.n, rec.seed))
    if config.out_path:
        write_csv(records, config.out_path)
        manifest = {
            "config": asdict(config),
            "version": __version__,
            "wall_time_secs": time.perf_counter() - wall_start,
            "rows": len(records),
        }
        with open(config.out_path + ".manifest.json", "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
    return records


def write_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            phase = list(rec.phase_costs) + [None] * (3 - len(rec.phase_costs))
            writer.writerow([
                rec.command, rec.n, rec.d, rec.k, rec.seed, rec.mode,
                _fmt(rec.cost), _fmt(rec.lower_bound), _fmt(rec.reference_bound),
                rec.escalations, _fmt(rec.converged), rec.status,
                _fmt(rec.runtime_ms),
                _fmt(phase[0]), _fmt(phase[1]), _fmt(phase[2]),
                ";".join(_fmt(v) for v in rec.trace),
            ])


def config_from_manifest(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as f:
        manifest = json.load(f)
    return ExperimentConfig(**manifest["config"])


# ---------------------------------------------------------------------------
# summaries


def _loglog_slope(ns, means):
    xs = [math.log(n) for n in ns]
    ys = [math.log(m) for m in means]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    sxx = sum((x - xbar) ** 2 for x in xs)
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    return sxy / sxx


def summarize(csv_path, out_path=None):
    """Per-n stats of the cost column plus a log-log slope fit of the means.

    Returns (rows, slope) where rows are dicts keyed by SUMMARY_COLUMNS.
    The slope is None when fewer than two distinct sizes carry costs.
    """
    groups = {}
    with open(csv_path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"line 1: {csv_path} is empty")
        required = ["n", "cost"]
        missing = [c for c in required if c not in header]
        if missing:
            raise CsvFormatError(f"line 1: missing columns {missing}")
        n_idx, cost_idx = header.index("n"), header.index("cost")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CsvFormatError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
            if row[cost_idx] == "":
                continue
            try:
                n = int(row[n_idx])
                cost = float(row[cost_idx])
            except ValueError as e:
                raise CsvFormatError(f"line {lineno}: {e}") from None
            groups.setdefault(n, []).append(cost)

    rows = []
    for n in sorted(groups):
        vals = np.array(groups[n])
        se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        rows.append({"n": n, "count": len(vals), "mean": float(vals.mean()),
                     "se": se, "min": float(vals.min()), "max": float(vals.max())})
    positive = [(r["n"], r["mean"]) for r in rows if r["mean"] > 0]
    slope = None
    if len(positive) >= 2:
        slope = _loglog_slope([p[0] for p in positive], [p[1] for p in positive])
    for r in rows:
        r["slope"] = slope

    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(SUMMARY_COLUMNS)
            for r in rows:
                writer.writerow([r["n"], r["count"], _fmt(r["mean"]), _fmt(r["se"]),
                                 _fmt(r["min"]), _fmt(r["max"]), _fmt(slope)])
    return rows, slope


def print_summary(rows, slope, file=None):
    file = file if file is not None else sys.stdout
    print(f"{'n':>6} {'count':>6} {'mean':>14} {'se':>12} {'min':>14} {'max':>14}",
          file=file)
    for r in rows:
        print(f"{r['n']:>6} {r['count']:>6} {r['mean']:>14.6g} {r['se']:>12.4g} "
              f"{r['min']:>14.6g} {r['max']:>14.6g}", file=file)
    if slope is not None:
        print(f"log-log slope of mean cost vs n: {slope:.6f}", file=file)


# ---------------------------------------------------------------------------
# CLI


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_n_list(values):
    out = []
    for v in values:
        for part in str(v).split(","):
            part = part.strip()
            if part:
                out.append(int(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="triassign-bench",
                description="Benchmark driver for random 3D assignment solvers")
    sub = p.add_subparsers(dest="command", required=True)

    def add_run_flags(sp):
        sp.add_argument("--n", action="append", required=True,
                        help="instance size; repeatable or comma separated")
        sp.add_argument("--d", type=int, default=3)
        sp.add_argument("--k", type=int, default=1)
        sp.add_argument("--reps", type=int, default=1)
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--mode", choices=["empirical", "refresh"],
                        default="empirical")
        sp.add_argument("--max-escalations", type=int,
                        default=planar.DEFAULT_MAX_ESCALATIONS)
        sp.add_argument("--out", default=None, help="CSV destination")
        sp.add_argument("--time-guard", type=float, default=None,
                        help="per-run cap in seconds")

    for cmd in ("solve-axial", "solve-planar", "solve-bilinear", "oracle", "bounds"):
        add_run_flags(sub.add_parser(cmd))
    sweep = sub.add_parser("sweep")
    sweep.add_argument("solver", choices=["axial", "planar", "bilinear"])
    add_run_flags(sweep)

    summ = sub.add_parser("summarize")
    summ.add_argument("csv_path")
    summ.add_argument("--out", default=None, help="summary CSV destination")
    return p


def config_from_args(args) -> ExperimentConfig:
    command = args.command
    if command == "sweep":
        command = f"solve-{args.solver}"
    return ExperimentConfig(command=command, n_list=_parse_n_list(args.n),
                            d=args.d, k=args.k, reps=args.reps,
                            base_seed=args.seed, mode=args.mode,
                            max_escalations=args.max_escalations,
                            out_path=args.out,
                            time_guard_secs=args.time_guard)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "summarize":
            rows, slope = summarize(args.csv_path, out_path=args.out)
            print_summary(rows, slope)
            return 0
        config = config_from_args(args)
        records = run(config)
        done = sum(1 for r in records if r.status == "ok")
        print(f"{len(records)} runs ({done} ok)"
              + (f" -> {config.out_path}" if config.out_path else ""))
        return 0
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # runtime failure contract: exit code 2
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
