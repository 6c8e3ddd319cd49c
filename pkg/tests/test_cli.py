"""Command-line interface: formats, exit codes, and report determinism."""

import csv
import json
import os
import subprocess
import sys

import pytest

PIN_INTERIOR = 8.955612003918067e-03


def run_cli(args, cwd=None, threads="1"):
    env = dict(os.environ)
    env["OFFSHELL_GF_THREADS"] = threads
    return subprocess.run(
        [sys.executable, "-m", "offshell_gf.cli", *args],
        capture_output=True, text=True, cwd=cwd, env=env)


def parse_csv(text):
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(rows))


def test_eval_csv_value():
    out = run_cli(["eval", "2,1,1", "--variant", "canonical"])
    assert out.returncode == 0, out.stderr
    assert out.stdout.startswith("# version=")
    recs = parse_csv(out.stdout)
    assert len(recs) == 1
    assert float(recs[0]["value"]) == pytest.approx(PIN_INTERIOR, rel=1e-13)
    assert recs[0]["region"] == "TIMELIKE5"
    assert recs[0]["variant"] == "canonical"


def test_eval_json_document():
    out = run_cli(["eval", "2,1,1", "0.5,3,0", "--variant", "retarded",
                   "--format", "json"])
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert set(doc) >= {"version", "config_sha256", "records"}
    vals = [rec["value"] for rec in doc["records"]]
    assert vals[0] == pytest.approx(2 * PIN_INTERIOR, rel=1e-13)
    assert vals[1] == 0.0


def test_eval_retarded_negative_tau_is_zero():
    out = run_cli(["eval", "2,1,-1", "--variant", "retarded"])
    recs = parse_csv(out.stdout)
    assert float(recs[0]["value"]) == 0.0


def test_eval_known_erroneous_flag():
    out = run_cli(["eval", "2,1,0.5", "--variant", "oh_published"])
    recs = parse_csv(out.stdout)
    assert "known-erroneous" in recs[0]["flags"]


def test_eval_singular_point_exits_2():
    out = run_cli(["eval", "1,1,0", "--variant", "canonical"])
    assert out.returncode == 2
    assert "1" in out.stderr and "error" in out.stderr.lower()


def test_eval_malformed_point_exits_2():
    out = run_cli(["eval", "2;1;1"])
    assert out.returncode == 2


def test_slice_masks_singular_cells():
    out = run_cli(["slice", "--plane", "t,r,tau=0.0", "--resolution", "9",
                   "--variant", "canonical", "--format", "json"])
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    recs = doc["records"]
    assert len(recs) == 81
    flagged = [rec for rec in recs if rec["flags"]]
    assert flagged and all(rec["value"] is None for rec in flagged)


def test_slice_retarded_below_gate_is_zero():
    out = run_cli(["slice", "--plane", "t,r,tau=-0.5", "--resolution", "9",
                   "--variant", "retarded"])
    assert out.returncode == 0
    vals = [float(rec["value"]) for rec in parse_csv(out.stdout)
            if rec["value"] != ""]
    assert vals and all(v == 0.0 for v in vals)


def test_slice_malformed_plane_exits_2():
    assert run_cli(["slice", "--plane", "t,t,tau=0"]).returncode == 2
    assert run_cli(["slice", "--plane", "t,r"]).returncode == 2


def test_verify_identities_passes(tmp_path):
    out = run_cli(["verify", "--suite", "identities"], cwd=tmp_path)
    assert out.returncode == 0, out.stdout + out.stderr
    assert "all_pass" in out.stdout
    rep = json.loads((tmp_path / "verify_identities.json").read_text())
    assert rep["all_pass"] is True
    assert rep["suite"] == "identities"
    assert all(row["passed"] for row in rep["rows"])


def test_verify_unknown_config_key_exits_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"bogus_key": 1}')
    out = run_cli(["verify", "--suite", "identities", "--config", str(cfg)],
                  cwd=tmp_path)
    assert out.returncode == 2


def test_verify_report_bytes_stable_across_threads(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    o1 = run_cli(["verify", "--suite", "identities", "--out", str(a)],
                 cwd=tmp_path, threads="1")
    o2 = run_cli(["verify", "--suite", "identities", "--out", str(b)],
                 cwd=tmp_path, threads="3")
    assert o1.returncode == 0 and o2.returncode == 0
    assert a.read_bytes() == b.read_bytes()
