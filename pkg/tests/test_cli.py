import json
import subprocess
import sys

import pytest

from halfspec.cli import main

BARRIER = '{"kind":"barrier","gamma":1.0,"R":2.0}'
WELL = '{"kind":"step","breakpoints":[0.0,2.0],"values":[[-1.1,0.4]]}'


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_jost_all_methods(capsys):
    code, out = run_cli(["jost", "--potential", BARRIER, "--z", "1.0,1.0", "--method", "all"], capsys)
    assert code == 0
    data = json.loads(out)
    methods = {r["method"] for r in data["results"]}
    assert methods == {"transfer-matrix", "series", "ode"}
    vals = [complex(*r["value"]) for r in data["results"]]
    assert abs(vals[0] - vals[1]) < 1e-7 and abs(vals[0] - vals[2]) < 1e-7


def test_spectrum_and_sums_pipeline(tmp_path, capsys):
    code, out = run_cli(["spectrum", "--potential", WELL, "--out", str(tmp_path)], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary["eigenvalues"] == 1
    spath = summary["output"]
    code, out = run_cli(["sums", "--spectrum", spath, "--kind", "j"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["n_terms"] == 1 and rep["value"] > 0


def test_spectrum_deterministic(tmp_path, capsys):
    run_cli(["spectrum", "--potential", WELL, "--out", str(tmp_path / "a")], capsys)
    run_cli(["spectrum", "--potential", WELL, "--out", str(tmp_path / "b")], capsys)
    [fa] = sorted((tmp_path / "a").glob("spectrum-*.jsonl"))
    [fb] = sorted((tmp_path / "b").glob("spectrum-*.jsonl"))
    assert fa.name == fb.name  # manifest id depends only on inputs
    assert fa.read_bytes() == fb.read_bytes()


def test_barrier_stream(tmp_path, capsys):
    code, out = run_cli(
        ["barrier", "--gamma", "1.0", "--R", "1200.0", "--jmax", "25", "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["M_R"] == 2020
    lines = [json.loads(s) for s in open(summary["output"])]
    assert len(lines) == 25
    assert all(l["in_spectrum"] for l in lines)
    assert [l["j"] for l in lines] == list(range(1, 26))


def test_bounds_exit_code(capsys):
    code, out = run_cli(["bounds", "--potential", WELL, "--suite", "upper"], capsys)
    assert code == 0
    data = json.loads(out)
    assert all(row["passed"] for row in data["bounds"])


def test_construct_toy(tmp_path, capsys):
    code, out = run_cli(["construct", "--stages", "1", "--profile", "toy", "--out", str(tmp_path)], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["stages"][0]["margin_certified"]
    csvs = list(tmp_path.glob("construct-series-*.csv"))
    assert csvs and csvs[0].read_text().startswith("n,jensen_partial")


def test_usage_error_exit_2(capsys):
    assert main(["jost", "--potential", BARRIER, "--z", "1.0,1.0", "--method", "nope"]) == 2
    assert main(["spectrum", "--potential", "/nonexistent.json"]) == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "halfspec.cli", "jost", "--potential", BARRIER, "--z", "0.5,0.5", "--method", "tm"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"][0]["method"] == "transfer-matrix"


def test_sums_generalized(tmp_path, capsys):
    spath = tmp_path / "spec.jsonl"
    spath.write_text('{"lambda":[-1.0,0.0],"multiplicity":1}\n{"lambda":[0.0,1.0],"multiplicity":1}\n')
    code, out = run_cli(["sums", "--spectrum", str(spath), "--kind", "gen", "--alpha", "1.0", "--beta", "1.0"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["raw_sum"] == pytest.approx(2.0)
    assert rep["value"] == pytest.approx(2.0 ** 0.5)
    code, out = run_cli(["sums", "--spectrum", str(spath), "--kind", "s", "--eps", "0.5"], capsys)
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(2.0)


def test_bounds_barrier_lower_suite(capsys):
    code, out = run_cli(
        ["bounds", "--potential", '{"kind":"barrier","gamma":1.0,"R":1200.0}', "--suite", "lower"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    names = {row["name"] for row in data["bounds"]}
    assert "barrier-S0-lower" in names
    assert all(row["passed"] for row in data["bounds"] if row["preconditions_met"])


def test_csv_mirrors_and_env_out(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HALFSPEC_OUT", str(tmp_path))
    code, out = run_cli(["spectrum", "--potential", WELL], capsys)
    assert code == 0
    assert list(tmp_path.glob("spectrum-*.csv"))
    code, out = run_cli(["barrier", "--gamma", "1.0", "--R", "1200.0", "--jmax", "10"], capsys)
    assert code == 0
    [csvf] = tmp_path.glob("barrier-*.csv")
    lines = csvf.read_text().splitlines()
    assert lines[0].startswith("j,re_lambda") and len(lines) == 11
