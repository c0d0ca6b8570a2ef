import csv
import json
import math

import pytest

from triassign import bench
from triassign.bench import (CsvFormatError, ExperimentConfig, UsageError,
                             config_from_manifest, run, summarize)


def _strip_runtime(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    idx = rows[0].index("runtime_ms")
    return [r[:idx] + r[idx + 1:] for r in rows]


def test_sweep_axial_rows(tmp_path):
    out = tmp_path / "axial.csv"
    cfg = ExperimentConfig(command="solve-axial", n_list=[20, 40], reps=2,
                           base_seed=5, out_path=str(out))
    records = run(cfg)
    assert len(records) == 4
    assert [(r.n, r.seed) for r in records] == [(20, 5), (20, 6), (40, 5), (40, 6)]
    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == bench.CSV_COLUMNS
    assert len(rows) == 5
    for rec in records:
        assert rec.cost >= rec.lower_bound - 1e-9
        assert rec.reference_bound == pytest.approx(
            2 * rec.n * sum(1 / i for i in range(1, rec.n + 1)))


def test_csv_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        run(ExperimentConfig(command="solve-planar", n_list=[10], reps=2,
                             base_seed=3, out_path=str(out)))
    assert _strip_runtime(a) == _strip_runtime(b)


def test_manifest_roundtrip(tmp_path):
    out = tmp_path / "r.csv"
    cfg = ExperimentConfig(command="solve-bilinear", n_list=[8], reps=2,
                           base_seed=11, out_path=str(out))
    run(cfg)
    manifest_path = str(out) + ".manifest.json"
    with open(manifest_path) as f:
        manifest = json.load(f)
    assert manifest["rows"] == 2
    assert manifest["config"]["command"] == "solve-bilinear"
    cfg2 = config_from_manifest(manifest_path)
    out2 = tmp_path / "r2.csv"
    cfg2.out_path = str(out2)
    run(cfg2)
    assert _strip_runtime(out) == _strip_runtime(out2)


def test_oracle_rows(tmp_path):
    out = tmp_path / "o.csv"
    records = run(ExperimentConfig(command="oracle", n_list=[5], reps=3,
                                   base_seed=1, out_path=str(out)))
    for rec in records:
        # cost is the heuristic, reference_bound the exact optimum
        assert rec.cost >= rec.reference_bound - 1e-9
        assert rec.reference_bound >= rec.lower_bound - 1e-9


def test_bounds_rows_d4():
    records = run(ExperimentConfig(command="bounds", n_list=[20], d=4, reps=2))
    for rec in records:
        assert rec.cost is None
        assert rec.lower_bound > 0


def test_planar_small_routes_to_exact():
    records = run(ExperimentConfig(command="solve-planar", n_list=[5], reps=2))
    from triassign import instance, planar
    for rec in records:
        t = instance.generate(5, 3, rec.seed)
        assert rec.cost == pytest.approx(planar.exact_planar(t).cost)
        assert rec.phase_costs == []


def test_bilinear_trace_column(tmp_path):
    out = tmp_path / "b.csv"
    run(ExperimentConfig(command="solve-bilinear", n_list=[6], reps=1,
                         base_seed=2, out_path=str(out)))
    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    trace = rows[1][bench.CSV_COLUMNS.index("trace")].split(";")
    vals = [float(v) for v in trace]
    assert len(vals) >= 2
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_config_validation():
    with pytest.raises(UsageError):
        run(ExperimentConfig(command="solve-axial", n_list=[]))
    with pytest.raises(UsageError):
        run(ExperimentConfig(command="solve-axial", n_list=[5], reps=0))
    with pytest.raises(UsageError):
        run(ExperimentConfig(command="nope", n_list=[5]))
    with pytest.raises(UsageError):
        run(ExperimentConfig(command="solve-axial", n_list=[5], d=4))
    with pytest.raises(UsageError):
        run(ExperimentConfig(command="bounds", n_list=[5], d=6))


def _write_csv(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["command", "n", "cost"])
        for r in rows:
            w.writerow(r)


def test_summarize_slope_exact_inverse(tmp_path):
    path = tmp_path / "s.csv"
    _write_csv(path, [["x", n, 1.0 / n] for n in (10, 20, 40, 80)])
    rows, slope = summarize(str(path))
    assert slope == pytest.approx(-1.0, abs=1e-9)
    assert [r["n"] for r in rows] == [10, 20, 40, 80]


def test_summarize_slope_zero(tmp_path):
    path = tmp_path / "s.csv"
    _write_csv(path, [["x", n, 3.5] for n in (10, 20)])
    _, slope = summarize(str(path))
    assert slope == pytest.approx(0.0, abs=1e-12)


def test_summarize_slope_nlogn(tmp_path):
    ns = (20, 40, 80, 160)
    path = tmp_path / "s.csv"
    _write_csv(path, [["x", n, n * math.log(n)] for n in ns])
    _, slope = summarize(str(path))
    # expected fit computed analytically from the synthetic points
    xs = [math.log(n) for n in ns]
    ys = [math.log(n * math.log(n)) for n in ns]
    xbar, ybar = sum(xs) / 4, sum(ys) / 4
    expected = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / \
        sum((x - xbar) ** 2 for x in xs)
    assert slope == pytest.approx(expected, abs=1e-12)
    assert 1.0 <= slope <= 1.3


def test_summarize_stats_and_csv(tmp_path):
    path = tmp_path / "s.csv"
    _write_csv(path, [["x", 10, 1.0], ["x", 10, 3.0], ["x", 20, 2.0]])
    out = tmp_path / "summary.csv"
    rows, slope = summarize(str(path), out_path=str(out))
    assert rows[0]["mean"] == 2.0
    assert rows[0]["se"] == pytest.approx(1.0)
    assert rows[0]["min"] == 1.0 and rows[0]["max"] == 3.0
    assert rows[1]["count"] == 1 and rows[1]["se"] == 0.0
    with open(out, newline="") as f:
        got = list(csv.reader(f))
    assert got[0] == bench.SUMMARY_COLUMNS
    assert len(got) == 3


def test_summarize_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    with open(path, "w") as f:
        f.write("command,n,cost\nx,10,1.0\nx,zap,2.0\n")
    with pytest.raises(CsvFormatError, match="line 3"):
        summarize(str(path))
    short = tmp_path / "short.csv"
    with open(short, "w") as f:
        f.write("command,n,cost\nx,10\n")
    with pytest.raises(CsvFormatError, match="line 2"):
        summarize(str(short))
    missing = tmp_path / "missing.csv"
    with open(missing, "w") as f:
        f.write("a,b\n1,2\n")
    with pytest.raises(CsvFormatError, match="line 1"):
        summarize(str(missing))


def test_cli_exit_codes(tmp_path, capsys):
    assert bench.main(["solve-axial", "--n", "5", "--reps", "1"]) == 0
    assert bench.main(["solve-axial"]) == 1            # missing --n
    assert bench.main(["bogus-cmd"]) == 1
    assert bench.main(["summarize", str(tmp_path / "nope.csv")]) == 2
    capsys.readouterr()


def test_cli_n_parsing_and_sweep(tmp_path):
    out = tmp_path / "c.csv"
    code = bench.main(["sweep", "axial", "--n", "5,6", "--n", "7",
                       "--reps", "1", "--out", str(out)])
    assert code == 0
    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    assert [r[1] for r in rows[1:]] == ["5", "6", "7"]
    assert all(r[0] == "solve-axial" for r in rows[1:])


def test_cli_summarize_prints(tmp_path, capsys):
    path = tmp_path / "s.csv"
    _write_csv(path, [["x", n, 1.0 / n] for n in (10, 20)])
    assert bench.main(["summarize", str(path)]) == 0
    captured = capsys.readouterr()
    assert "slope" in captured.out
    assert "-1.0" in captured.out


def test_time_guard_marks_timeout():
    records = run(ExperimentConfig(command="solve-planar", n_list=[30],
                                   reps=1, time_guard_secs=0.0))
    assert records[0].status == "timeout"
