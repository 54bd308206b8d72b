import json
import subprocess
import sys
from pathlib import Path

import pytest

from sodkit.cli import _run, batch_run, main, read_batch_config

ROOT = Path(__file__).resolve().parents[1]
QUICK = ROOT / "configs" / "quick.ini"


def run(argv):
    payload, code = _run(argv)
    return json.loads(json.dumps(payload, default=str)), code


def test_sod_prints_psi():
    payload, code = run(["sod", "--phi", "x^3"])
    assert code == 0
    assert payload["psi"].replace(" ", "") in ("3*X+3*Y", "3X+3Y", "3*Y+3*X")
    assert payload["chi"]


def test_sod_registry_and_fiber():
    payload, code = run(["sod", "--handle", "jb:4", "--fiber", "1,2"])
    assert code == 0 and "fiber" in payload


def test_exit_codes():
    assert run(["verify-padic", "--p", "3", "--i", "1", "--m", "3", "--phi", "x^3"])[1] == 0
    assert run(["rolle", "--p-list", "3"])[1] == 0
    payload, code = run(["jb-verify", "--k", "4", "--p", "13"])
    assert code == 2 and payload["error"] == "HypothesisFailed" and payload["hypothesis"]
    assert run(["sod", "--phi", "x"])[1] == 2
    assert run(["no-such-command"])[1] == 2
    assert run(["sod", "--phi", "x^2", "--handle", "cubic"])[1] == 2
    assert run(["verify-real", "--phi", "x", "--R", "2", "--C", "1"])[1] == 2


def test_verification_failure_exits_one():
    # a voorhoeve tolerance below zero cannot be met, so the run completes and fails
    payload, code = run(["voorhoeve", "--phi", "x^3 + x^4/100", "--k", "3", "--beta", "5", "--pairs", "2",
                         "--tol", "-1"])
    assert code == 1 and payload["passed"] is False


def test_hensel_and_prime_search():
    payload, _ = run(["hensel", "--phi", "x^2-2", "--p", "7", "--root", "3", "--N", "3"])
    assert payload["lifted"] == 108
    payload, _ = run(["prime-search", "--k", "4", "--bound", "30"])
    assert payload["primes"] == [3, 5, 7, 17, 19, 29]


def test_kdv_count_options():
    payload, code = run(["kdv-count", "--phi", "x^3", "--field", "padic", "--p", "3", "--R", "9",
                         "--base", "0,1", "--per-base"])
    assert code == 0 and payload["bases"] == 1 and len(payload["per_base"]) == 1
    payload, code = run(["kdv-count", "--phi", "x^2", "--field", "padic", "--R", "9"])
    assert code == 2


def test_dio_count():
    payload, code = run(["dio-count", "--phi", "x^3", "--set-spec", "range:1..10", "--p", "7", "--i", "1"])
    assert code == 0 and payload["tally"]["total"] == 190


def test_verify_real_cli_and_csv(tmp_path):
    csv = tmp_path / "g.csv"
    payload, code = run(["verify-real", "--handle", "cosh", "--R", "2", "--C", "1", "--convex", "--no-refine",
                         "--csv", str(csv)])
    assert code == 0 and csv.exists()
    payload, code = run(["verify-real", "--phi", "x^2", "--R", "2", "--C", "1", "--no-refine", "--f", "1,0"])
    assert code == 0 and payload["ratio"] == pytest.approx(1.0)
    assert run(["verify-real", "--phi", "x^2", "--R", "2", "--C", "1", "--f", "1,0,0"])[1] == 2


def test_out_and_timing(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["--out", str(out), "rolle", "--p-list", "5"]) == 0
    data = json.loads(out.read_text())
    assert data["passed"] and "timing_seconds" not in data
    payload, _ = _run(["--timing", "rolle", "--p-list", "5"])
    assert "timing_seconds" in payload


def test_error_message_on_stderr(capsys):
    assert main(["jb-verify", "--k", "4", "--p", "13"]) == 2
    err = capsys.readouterr().err
    assert "HypothesisFailed" in err and "13" in err


def test_batch_isolation(tmp_path):
    cfg = tmp_path / "b.ini"
    cfg.write_text(
        "[job:bad]\nargs = sod --phi \"x\"\n"
        "[job:good]\nargs = rolle --p-list 3\n"
        "[job:nested]\nargs = batch other.ini\n"
    )
    report, passed = batch_run(str(cfg))
    assert not passed
    codes = {j["name"]: j["exit_code"] for j in report["jobs"]}
    assert codes == {"bad": 2, "good": 0, "nested": 2}
    assert [j["name"] for j in report["jobs"]] == ["bad", "good", "nested"]


def test_empty_batch_passes(tmp_path):
    cfg = tmp_path / "e.ini"
    cfg.write_text("[batch]\nseed = 1\n")
    report, passed = batch_run(str(cfg))
    assert passed and report["job_count"] == 0


def test_batch_config_errors(tmp_path):
    cfg = tmp_path / "x.ini"
    cfg.write_text("[job:a]\nfoo = 1\n")
    assert run(["batch", str(cfg)])[1] == 2
    assert run(["batch", str(tmp_path / "missing.ini")])[1] == 2


def test_batch_seed_reaches_seeded_jobs():
    jobs, settings = read_batch_config(str(QUICK))
    assert settings["seed"] == "7"
    report, _ = batch_run(str(QUICK))
    v = next(j for j in report["jobs"] if j["name"] == "voorhoeve-quartic")
    assert v["report"]["seed"] == 7


def test_batch_is_deterministic(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--out", str(a), "batch", str(QUICK)]) == 0
    monkeypatch.setenv("SODKIT_JOBS", "3")
    assert main(["--out", str(b), "batch", str(QUICK)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "sodkit.cli", "rolle", "--p-list", "3"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["passed"]
