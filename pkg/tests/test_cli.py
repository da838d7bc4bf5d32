import csv
import json
import math
import subprocess
import sys

import pytest

from gsb.cli import (
    COLUMNS,
    SchemaError,
    UsageError,
    default_grid,
    expand_grid,
    main,
    parse_budget,
    read_results,
    resolve_spec,
)
from gsb.stream import DriftStreamConfig, generate_drift_stream, write_stream

SYNTH = {
    "seed": 3,
    "segments": [
        {"count": 250, "concept": ["C", "N"], "nodes": [3, 7], "noise": 0.05},
        {"count": 250, "concept": ["O", "S"], "nodes": [3, 7], "noise": 0.05},
    ],
}


@pytest.fixture
def synth(tmp_path):
    p = tmp_path / "synth.json"
    p.write_text(json.dumps(SYNTH))
    return str(p)


def run(*argv, environ=None):
    return main(list(argv), environ=environ or {})


def test_run_writes_records_and_summary(tmp_path, synth):
    out = tmp_path / "r.csv"
    assert run("run", "--synthetic", synth, "--budget", "inf", "--out", str(out)) == 0
    rows = read_results(out.read_text())
    assert [r["kind"] for r in rows] == ["record"] * 10 + ["summary"]
    assert [r["t"] for r in rows[:10]] == list(range(49, 500, 50))
    assert rows[-1]["t"] == 500
    assert rows[-1]["cumulative_errors"] == rows[-2]["cumulative_errors"]


def test_budget_parsing():
    assert parse_budget("inf") == math.inf
    assert parse_budget("10000") == 10000
    for bad in ("0.5", "lots", True):
        with pytest.raises(UsageError):
            parse_budget(bad)


def strip_elapsed(text):
    lines = text.splitlines()
    i = COLUMNS.index("elapsed_ns")
    return [lines[0]] + [",".join(r[:i] + r[i + 1 :]) for r in csv.reader(lines[1:])]


def test_repeat_runs_identical_except_elapsed(tmp_path, synth):
    texts = []
    for k in range(2):
        out = tmp_path / f"r{k}.csv"
        assert run("run", "--synthetic", synth, "--algo", "mixed", "--policy", "random", "--budget", "300", "--seed", "4", "--out", str(out)) == 0
        texts.append(out.read_text())
    assert strip_elapsed(texts[0]) == strip_elapsed(texts[1])


def test_stream_file_and_inline_synthetic_agree(tmp_path):
    cfg = DriftStreamConfig.from_dict(SYNTH)
    path = tmp_path / "s.txt"
    path.write_text(write_stream(generate_drift_stream(cfg)))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("run", "--stream", str(path), "--out", str(a)) == 0
    assert run("run", "--synthetic", json.dumps(SYNTH), "--out", str(b)) == 0
    assert strip_elapsed(a.read_text()) == strip_elapsed(b.read_text())


def test_generate_matches_library(tmp_path, synth):
    out = tmp_path / "s.txt"
    assert run("generate", "--synthetic", synth, "--out", str(out)) == 0
    assert out.read_text() == write_stream(generate_drift_stream(DriftStreamConfig.from_dict(SYNTH)))


def test_precedence(tmp_path):
    conf = tmp_path / "c.yaml"
    conf.write_text("kernel: odd\nh: 3\nlambda: 1.2\nC: 0.1\nstream: x.txt\n")
    spec = resolve_spec({"h": 2}, conf, {"GSB_C": "1.0", "GSB_H": "4", "GSB_UNRELATED": "z"})
    assert (spec.kernel, spec.h, spec.lam, spec.C) == ("odd", 2, 1.2, 1.0)


def test_env_budget_inf(tmp_path, synth):
    spec = resolve_spec({"synthetic": synth}, None, {"GSB_BUDGET": "inf", "GSB_NORMALIZE": "1"})
    assert spec.budget == math.inf and spec.normalize


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--budget", "inf"],  # no stream source
        ["run", "--synthetic", "{}"],
        ["run", "--synthetic", "{bad json"],
        ["run", "--stream", "/nonexistent/stream.txt"],
        ["run", "--synthetic", "SYNTH", "--algo", "primal", "--policy", "tau"],
        ["run", "--synthetic", "SYNTH", "--budget", "-3"],
        ["run", "--synthetic", "SYNTH", "--eval-every", "0"],
    ],
)
def test_errors_exit_nonzero_without_output(tmp_path, synth, capsys, argv):
    out = tmp_path / "r.csv"
    argv = [synth if a == "SYNTH" else a for a in argv]
    assert run(*argv, "--out", str(out)) != 0
    assert "error" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == [tmp_path / "synth.json"]


def test_bad_stream_file_names_line(tmp_path, capsys):
    p = tmp_path / "s.txt"
    p.write_text("g 1\nv 0 C\ne 0 3\nl +1\n")
    assert run("run", "--stream", str(p), "--out", str(tmp_path / "r.csv")) != 0
    assert "line 3" in capsys.readouterr().err
    assert not (tmp_path / "r.csv").exists()


def test_schema_validation_rejects_tampering(tmp_path, synth):
    out = tmp_path / "r.csv"
    run("run", "--synthetic", synth, "--out", str(out))
    text = out.read_text()
    with pytest.raises(SchemaError):
        read_results(text.replace("gsb-results/1", "gsb-results/0"))
    with pytest.raises(SchemaError):
        read_results("\n".join(text.splitlines()[:-1]))  # no summary row
    with pytest.raises(SchemaError):
        read_results(text.replace("record,", "recrod,", 1))


def test_sweep_grid(tmp_path, synth):
    grid = tmp_path / "grid.yaml"
    grid.write_text("kernel: [fs]\nh: [0, 1, 2]\nbudget: [10000, 50000]\n")
    out = tmp_path / "sweep"
    assert run("sweep", "--synthetic", synth, "--grid", str(grid), "--out", str(out)) == 0
    index = list(csv.DictReader((out / "index.csv").open()))
    assert len(index) == 6
    assert {(r["h"], r["budget"]) for r in index} == {(str(h), str(b)) for h in (0, 1, 2) for b in (10000, 50000)}
    for r in index:
        assert r["status"] == "ok"
        read_results((out / r["file"]).read_text())


def test_sweep_records_failures(tmp_path, synth):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"algo": ["primal"], "policy": ["weight", "tau"]}))
    out = tmp_path / "sweep"
    assert run("sweep", "--synthetic", synth, "--grid", str(grid), "--out", str(out)) == 1
    index = list(csv.DictReader((out / "index.csv").open()))
    assert [r["status"] for r in index] == ["ok", "error"]
    assert "tau" in index[1]["error"]


def test_sweep_parallel_matches_serial(tmp_path, synth):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"kernel": ["fs", "nspdk"], "C": [0.01, 1.0]}))
    texts = {}
    for jobs in (1, 2):
        out = tmp_path / f"j{jobs}"
        assert run("sweep", "--synthetic", synth, "--grid", str(grid), "--out", str(out), "--jobs", str(jobs)) == 0
        texts[jobs] = [strip_elapsed((out / f"run-{i:04d}.csv").read_text()) for i in range(4)]
    assert texts[1] == texts[2]


@pytest.mark.parametrize("grid", [{}, [], {"h": []}])
def test_empty_grid_is_usage_error(tmp_path, synth, grid, capsys):
    p = tmp_path / "grid.json"
    p.write_text(json.dumps(grid))
    assert run("sweep", "--synthetic", synth, "--grid", str(p), "--out", str(tmp_path / "o")) == 2
    err = capsys.readouterr().err
    assert "empty" in err or "no values" in err
    assert not (tmp_path / "o").exists()


def test_default_grid_sizes():
    combos = expand_grid(default_grid())
    kinds = [c["kernel"] for c in combos]
    assert kinds.count("fs") == 9 * 3
    assert kinds.count("nspdk") == 6 * 4 * 3
    assert kinds.count("odd") == 6 * 4 * 3
    assert {c["C"] for c in combos} == {0.01, 0.1, 1.0}


def test_module_entry_point(tmp_path, synth):
    proc = subprocess.run(
        [sys.executable, "-m", "gsb", "run", "--synthetic", synth, "--eval-every", "100"],
        capture_output=True,
        text=True,
        check=True,
    )
    rows = read_results(proc.stdout)
    assert len(rows) == 6
