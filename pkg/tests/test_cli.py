import csv

import numpy as np
import pytest

from l0screen.cli import BENCH_COLUMNS, main
from l0screen.io import read_instance


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_kv(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines())


def test_gen_is_deterministic(tmp_path, capsys):
    a, b, c = tmp_path / "a.txt", tmp_path / "b.txt", tmp_path / "c.txt"
    args = ["gen", "--setup", "gaussian", "--m", "20", "--n", "30", "--k", "3"]
    code, out, _ = run(capsys, *args, "--seed", "7", "--out", str(a))
    assert code == 0
    assert set(parse_kv(out)) == {"lambda", "M", "sigma"}
    run(capsys, *args, "--seed", "7", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    run(capsys, *args, "--seed", "8", "--out", str(c))
    assert not np.array_equal(read_instance(a)[0].y, read_instance(c)[0].y)


def test_gen_rejects_invalid_k(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "--setup", "gaussian", "--m", "20", "--n", "30",
                       "--k", "30", "--seed", "1", "--out", str(tmp_path / "x.txt"))
    assert code != 0 and "error" in err
    assert not (tmp_path / "x.txt").exists()


def test_solve_screening_on_off_agree(tmp_path, capsys):
    path = tmp_path / "i.txt"
    run(capsys, "gen", "--setup", "gaussian", "--m", "20", "--n", "12", "--k", "3",
        "--seed", "4", "--out", str(path))
    results = {}
    for mode in ("on", "off"):
        code, out, _ = run(capsys, "solve", "--instance", str(path), "--screening", mode)
        assert code == 0
        results[mode] = parse_kv(out)
    assert results["on"]["objective"] == results["off"]["objective"]
    assert results["on"]["optimal"] == "true"
    for key in ("nodes_processed", "wall_time_seconds", "nodes_screened_out", "variables_fixed_by_screening"):
        assert key in results["on"]


def test_solve_timeout_exit_code(tmp_path, capsys):
    path = tmp_path / "hard.txt"
    run(capsys, "gen", "--setup", "gaussian", "--m", "60", "--n", "120", "--k", "6",
        "--seed", "0", "--out", str(path))
    code, out, _ = run(capsys, "solve", "--instance", str(path), "--time-limit", "0.001")
    assert code == 2
    kv = parse_kv(out)
    assert kv["optimal"] == "false" and float(kv["objective"]) > 0


def test_solve_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "solve", "--instance", str(tmp_path / "missing.txt"))
    assert code == 1 and "error" in err


def test_solve_trace(tmp_path, capsys):
    path = tmp_path / "i.txt"
    run(capsys, "gen", "--setup", "toeplitz", "--m", "20", "--n", "10", "--k", "2",
        "--seed", "1", "--out", str(path))
    code, _, err = run(capsys, "solve", "--instance", str(path), "--trace")
    assert code == 0
    assert any(line.startswith("node=") for line in err.splitlines())


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [dict(zip(header, row)) for row in reader]


def test_bench_rows_and_aggregates(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--setup", "gaussian", "--m", "15", "--n", "10",
                     "--k", "3", "--trials", "5", "--time-limit", "60", "--out", str(out))
    assert code == 0
    header, rows = read_csv(out)
    assert header == BENCH_COLUMNS
    data = [r for r in rows if r["seed"] != "mean"]
    agg = [r for r in rows if r["seed"] == "mean"]
    assert len(data) == 10 and len(agg) == 2
    for a in agg:
        group = [r for r in data if r["method"] == a["method"]]
        assert float(a["nodes"]) == pytest.approx(np.mean([float(r["nodes"]) for r in group]))
        assert float(a["time_seconds"]) == pytest.approx(np.mean([float(r["time_seconds"]) for r in group]))
        assert int(a["failed"]) == sum(int(r["failed"]) for r in group)
    for seed in range(5):
        pair = [r for r in data if r["seed"] == str(seed)]
        assert float(pair[0]["objective"]) == pytest.approx(float(pair[1]["objective"]), abs=1e-9)


def test_bench_is_deterministic(tmp_path, capsys):
    outs = []
    for name in ("x.csv", "y.csv"):
        path = tmp_path / name
        run(capsys, "bench", "--setup", "toeplitz", "--m", "15", "--n", "10", "--k", "2,3",
            "--trials", "2", "--seed0", "3", "--out", str(path))
        _, rows = read_csv(path)
        outs.append([(r["k"], r["seed"], r["method"], r["nodes"], r["objective"]) for r in rows])
    assert outs[0] == outs[1]
    assert len(outs[0]) == 2 * 2 * 2 + 4


def test_bench_failed_rows_respect_time_limit(tmp_path, capsys):
    path = tmp_path / "f.csv"
    run(capsys, "bench", "--setup", "gaussian", "--m", "60", "--n", "120", "--k", "6",
        "--trials", "1", "--time-limit", "0.01", "--out", str(path))
    _, rows = read_csv(path)
    for r in rows:
        if r["seed"] != "mean" and r["failed"] == "1":
            assert float(r["time_seconds"]) >= 0.01


def test_bench_rejects_bad_k(tmp_path, capsys):
    code, _, err = run(capsys, "bench", "--setup", "gaussian", "--m", "15", "--n", "10",
                       "--k", "5", "--trials", "1", "--out", str(tmp_path / "z.csv"))
    assert code == 1 and "error" in err
