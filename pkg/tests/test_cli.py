import json
import os

import pytest

from cli.schemas import RunConfig, parse_q
from main import main
from services.common import get_settings


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out else None


def test_parse_q():
    assert parse_q("3^2") == 9
    assert parse_q("8") == 8
    assert parse_q(5) == 5


def test_run_config_grid_is_sorted():
    config = RunConfig(command="x", n=[3, 2], q=["2", "3"], a=[1], ell=[5, 2])
    assert config.grid() == [(2, 2, 1, 2), (2, 2, 1, 5), (2, 3, 1, 2), (2, 3, 1, 5),
                             (3, 2, 1, 2), (3, 2, 1, 5), (3, 3, 1, 2), (3, 3, 1, 5)]
    assert config.grid(with_a=False, with_ell=False)[0] == (2, 2)


def test_verify_bruhat(capsys):
    code, report = run_json(capsys, "verify", "bruhat", "--n", "2", "--q", "3", "--a", "1")
    assert code == 0
    assert report["command"] == "verify bruhat"
    assert report["passed"]
    assert report["results"][0]["elements"] == 24
    assert report["wall_time"] is None


def test_verify_bruhat_grid(capsys):
    code, report = run_json(capsys, "verify", "bruhat", "--n", "3", "--n", "2", "--q", "2")
    assert code == 0
    assert [r["elements"] for r in report["results"]] == [6, 168]


def test_verify_coefficient_sums(capsys):
    code, report = run_json(capsys, "verify", "coefficient-sums", "--n", "2", "--q", "3", "--a", "1", "--ell", "2")
    assert code == 0
    assert report["results"][0]["cases"] == 3


def test_verify_eta_and_identity(capsys):
    code, _ = run_json(capsys, "verify", "eta", "--n", "3", "--q", "2", "--ell", "3", "--ell", "5")
    assert code == 0
    code, report = run_json(capsys, "verify", "identity", "--n", "3", "--q", "2", "--ell", "5")
    assert code == 0
    assert [r["i"] for r in report["results"]] == [1, 2, 3]


def test_verify_basis(capsys):
    code, report = run_json(capsys, "verify", "basis", "--n", "2", "--q", "3", "--ell", "2", "--roundtrips", "10")
    assert code == 0
    assert report["results"][0]["rank"] == 3


def test_reach_eta_all_vectors_and_replay(capsys, tmp_path):
    certs = tmp_path / "certs"
    code, report = run_json(capsys, "reach-eta", "--n", "2", "--q", "3", "--ell", "2", "--all-vectors",
                            "--certs", str(certs), "--with-spin")
    assert code == 0
    result = report["results"][0]
    assert len(result["certificates"]) == 7
    assert all(c["verified"] for c in result["certificates"])
    assert result["max_level_seen"] >= 2
    assert result["spin"]["irreducible"] is False
    assert len(report["certificates"]) == 7
    assert all(os.path.exists(p) for p in report["certificates"])
    tower_levels = {level["level"] for level in result["tower"]["levels"]}
    assert all(c["matrix_level"] in tower_levels for c in result["certificates"])

    code, replay = run_json(capsys, "verify-certificate", *report["certificates"])
    assert code == 0
    assert all(r["verified"] for r in replay["results"])


def test_reach_eta_is_deterministic(capsys, tmp_path):
    argv = ["reach-eta", "--n", "2", "--q", "3", "--ell", "5", "--random", "3", "--seed", "7",
            "--certs", str(tmp_path / "certs")]
    first, out1, _ = run(capsys, *argv, "--out", str(tmp_path / "one.json"))
    cert_text = {p: open(p).read() for p in sorted((tmp_path / "certs").iterdir())}
    second, out2, _ = run(capsys, *argv, "--out", str(tmp_path / "two.json"))
    assert first == second == 0
    assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()
    assert cert_text == {p: open(p).read() for p in sorted((tmp_path / "certs").iterdir())}
    assert len(cert_text) == 3


def test_tampered_certificate_file_fails(capsys, tmp_path):
    certs = tmp_path / "certs"
    code, report = run_json(capsys, "reach-eta", "--n", "2", "--q", "3", "--ell", "5", "--random", "1",
                            "--certs", str(certs))
    assert code == 0
    path = report["certificates"][0]
    text = open(path).read()
    claimed = next(line for line in text.splitlines() if line.startswith("claimed "))
    value = int(claimed.split()[1])
    with open(path, "w") as fh:
        fh.write(text.replace(claimed, f"claimed {value % 4 + 1}"))
    code, replay = run_json(capsys, "verify-certificate", path)
    assert code == 1
    assert replay["results"][0]["verified"] is False


def test_scan_quasifinite(capsys):
    code, report = run_json(capsys, "scan", "quasifinite", "--n", "3", "--q", "2", "--ell", "3", "--amax", "64")
    assert code == 0
    result = report["results"][0]
    assert result["all_divisible"] and result["period_covered"]


def test_scan_quasifinite_csv(capsys):
    code, out, _ = run(capsys, "scan", "quasifinite", "--n", "2", "--q", "3", "--ell", "5", "--amax", "4",
                       "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,q,ell,a,residues,product_mod_ell,divisible"
    assert len(lines) == 5


def test_scan_coprime(capsys):
    code, report = run_json(capsys, "scan", "coprime", "--n", "9", "--q", "2", "--amax", "32")
    assert code == 0
    assert report["results"][0]["passed"]


def test_steinberg_report(capsys):
    code, report = run_json(capsys, "steinberg-report", "--n", "2", "--q", "3", "--ell", "2")
    assert code == 0
    assert report["results"][0]["proper_dims"]


def test_human_format(capsys):
    code, out, _ = run(capsys, "scan", "coprime", "--n", "2", "--q", "3", "--amax", "2", "--format", "human")
    assert code == 0
    assert "command: scan coprime" in out


def test_timing_is_opt_in(capsys):
    code, report = run_json(capsys, "scan", "coprime", "--n", "2", "--q", "3", "--amax", "2", "--timing")
    assert code == 0
    assert report["wall_time"] is not None


@pytest.mark.parametrize("argv, expected", [
    (["verify", "eta", "--n", "2", "--q", "3", "--ell", "3"], 3),
    (["reach-eta", "--n", "2", "--q", "3^2", "--ell", "3"], 3),
    (["verify", "eta", "--n", "2", "--q", "3"], 2),
    (["verify", "bruhat", "--q", "6"], 2),
    (["verify", "eta", "--n", "2", "--q", "3", "--ell", "4"], 2),
    (["scan", "coprime", "--n", "4", "--q", "2"], 2),
    (["verify", "bruhat", "--n", "3", "--q", "3", "--a", "2"], 2),
    (["verify", "eta", "--n", "2", "--q", "3", "--ell", "2", "--format", "csv"], 2),
    (["verify-certificate", "/nonexistent/file.cert"], 2),
    (["scan", "coprime", "--n", "2", "--q", "3", "--amax", "2", "--log-level", "foo"], 2),
])
def test_exit_codes(capsys, argv, expected):
    code, _, err = run(capsys, *argv)
    assert code == expected
    assert err


def test_scan_quasifinite_without_ell_uses_candidates(capsys):
    code, report = run_json(capsys, "scan", "quasifinite", "--n", "3", "--q", "2", "--amax", "8")
    assert code == 0
    assert [r["ell"] for r in report["results"]] == [3, 7]


def test_reach_eta_report_carries_tower_and_w0(capsys):
    code, report = run_json(capsys, "reach-eta", "--n", "3", "--q", "2", "--ell", "5", "--random", "1")
    assert code == 0
    result = report["results"][0]
    assert result["datum"]["w0_word"] == [1, 2, 1]
    assert result["tower"]["levels"][0]["level"] == 1


def test_invalid_environment_setting(capsys, monkeypatch):
    monkeypatch.setenv("STEINBERG_SEED", "abc")
    get_settings.cache_clear()
    try:
        code, _, err = run(capsys, "scan", "coprime", "--n", "2", "--q", "3", "--amax", "2")
    finally:
        get_settings.cache_clear()
    assert code == 2
    assert "seed" in err


def test_log_level_is_case_insensitive(capsys):
    code, _, _ = run(capsys, "scan", "coprime", "--n", "2", "--q", "3", "--amax", "2", "--log-level", "info")
    assert code == 0
