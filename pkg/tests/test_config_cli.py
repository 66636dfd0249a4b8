import json
import subprocess
import sys

import numpy as np
import pytest

from thetalab import cli
from thetalab.config import RunConfig, config_from_dict, config_to_dict, load_config
from thetalab.errors import ConfigInvalid


def test_default_roundtrip():
    cfg = RunConfig()
    again = config_from_dict(json.loads(json.dumps(config_to_dict(cfg))))
    assert np.array_equal(again.tau, cfg.tau)
    assert again.coeffs == cfg.coeffs and again.tolerances == cfg.tolerances


@pytest.mark.parametrize("data", [
    {"tau": [[[0, 1]]]},
    {"tau": [[[0, -1], [0, 0], [0, 0]], [[0, 0], [0, 1], [0, 0]], [[0, 0], [0, 0], [0, 1]]]},
    {"tau": [[[0, 1], [1, 0], [0, 0]], [[0, 0], [0, 1], [0, 0]], [[0, 0], [0, 0], [0, 1]]]},
    {"coeffs": {"b": [0, 0], "c": [1, 0], "d": [1, 0]}},
    {"coeffs": {"b": [1, 0]}},
    {"seed": -1},
    {"seed": 2**64},
    {"samples": 0},
    {"suites": ["nope"]},
    {"tolerances": {"v3": -1}},
    {"tolerances": {"unknown": 1e-3}},
    {"extra": 1},
    [],
])
def test_invalid_configs(data):
    with pytest.raises(ConfigInvalid):
        config_from_dict(data)


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigInvalid):
        load_config(bad)
    with pytest.raises(ConfigInvalid):
        load_config(tmp_path / "missing.json")


def run_cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "thetalab", *args], capture_output=True, text=True, env=env)


def test_config_error_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": "x"}))
    out = run_cli("run", "--config", str(cfg), "--suite", "bidouble")
    assert out.returncode == 2
    assert len(out.stderr.strip().splitlines()) == 1


def test_unknown_suite_flag_exit_code():
    out = run_cli("run", "--suite", "everything")
    assert out.returncode == 2
    assert len(out.stderr.strip().splitlines()) == 1


def test_bad_thread_count(monkeypatch):
    monkeypatch.setenv("VERIFIER_THREADS", "zero")
    assert cli.main(["run", "--suite", "bidouble"]) == 2


def test_samples_out_needs_canonical(tmp_path):
    assert cli.main(["run", "--suite", "bidouble", "--samples-out", str(tmp_path / "s.csv")]) == 2


def test_failing_check_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tolerances": {"odd_vanishing": 1e-30}}))
    report = tmp_path / "r.json"
    assert cli.main(["run", "--config", str(cfg), "--suite", "theta", "--out", str(report)]) == 1
    data = json.loads(report.read_text())
    failed = [r["check"] for r in data["results"] if r["status"] == "fail"]
    assert failed == ["odd_vanishing"]
    assert data["exit_code"] == 1


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 5, "suites": ["theta"]}))
    report = tmp_path / "r.json"
    assert cli.main(["run", "--config", str(cfg), "--suite", "bidouble", "--seed", "9", "--out", str(report)]) == 0
    data = json.loads(report.read_text())
    assert data["config"]["seed"] == 9 and data["suites"] == ["bidouble"]


def test_report_schema(tmp_path):
    report = tmp_path / "r.json"
    assert cli.main(["run", "--suite", "bidouble", "--out", str(report)]) == 0
    data = json.loads(report.read_text())
    for r in data["results"]:
        assert set(r) == {"suite", "check", "status", "max_error", "count", "details", "paper_anchor"}
        assert r["paper_anchor"]
        assert r["status"] in ("pass", "fail", "finding")


def test_engine_errors_become_failed_checks(tmp_path):
    cfg = tmp_path / "c.json"
    tau = [[[0, 1], [0.1, 0], [0, 0]], [[0.1, 0], [0, 1.3], [0, 0]], [[0, 0], [0, 0], [0, 0.7]]]
    cfg.write_text(json.dumps({"tau": tau}))
    report = tmp_path / "r.json"
    assert cli.main(["run", "--config", str(cfg), "--suite", "models", "--out", str(report)]) == 1
    data = json.loads(report.read_text())
    base = next(r for r in data["results"] if r["check"] == "base_points")
    assert base["status"] == "fail" and "NotDiagonal" in base["details"]


def test_determinism_across_thread_counts(tmp_path):
    paths = []
    for threads in ("1", "3"):
        rep, csv = tmp_path / f"r{threads}.json", tmp_path / f"s{threads}.csv"
        env = dict(__import__("os").environ, VERIFIER_THREADS=threads)
        out = run_cli("run", "--suite", "canonical", "--samples", "6", "--seed", "42",
                      "--out", str(rep), "--samples-out", str(csv), env=env)
        assert out.returncode == 0, out.stderr
        paths.append((rep, csv))
    (r1, c1), (r2, c2) = paths
    assert c1.read_bytes() == c2.read_bytes()
    assert json.loads(r1.read_text()) == json.loads(r2.read_text())
    lines = c1.read_bytes().split(b"\n")
    assert b"\r" not in c1.read_bytes()
    assert lines[0].decode() == ",".join(cli.CSV_HEADER)
    assert sum(line.startswith(b"sample,") for line in lines) == 6
