from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from ellischub.cli import main, parse_config

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def _run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_golden_table_gl3(capsys):
    code, out = _run(["table", "--group", "a2", "--golden", "data/gl3.json", "--format", "json"], capsys)
    assert code == 0
    checks = json.loads(out)["checks"]
    golden = [c for c in checks if c["id"].startswith("golden")]
    assert len(golden) == 36 and all(c["status"] == "pass" for c in golden)


def test_golden_path_on_disk(capsys):
    path = os.path.join(ROOT, "src", "ellischub", "data", "sp2.json")
    code, out = _run(["table", "--golden", path, "--order", "3"], capsys)
    assert code == 0 and "table: 192 pass" in out


def test_golden_group_mismatch_is_usage_error(capsys):
    assert main(["table", "--group", "c2", "--golden", "gl3"]) == 2


@pytest.mark.parametrize("argv", [["table", "--order", "0"], ["bogus"], ["table", "--points", "0"],
                                  ["table", "--format", "xml"]])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_identities_and_determinism(capsys):
    argv = ["check-identities", "--order", "6", "--points", "5", "--format", "json"]
    code, first = _run(argv, capsys)
    _, second = _run(argv, capsys)
    assert code == 0 and first == second
    ids = [c["id"] for c in json.loads(first)["checks"]]
    assert ids == sorted(ids)
    assert {"fay trisecant", "blow-up", "four-term"} <= set(ids)


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("ELLISCHUB_SEED", "99")
    assert parse_config(["limits"]).seed == 99
    assert parse_config(["limits", "--seed", "5"]).seed == 5
    monkeypatch.delenv("ELLISCHUB_SEED")
    assert parse_config(["limits"]).seed == 20240001


def test_failure_exit_code(monkeypatch, capsys):
    import ellischub.cli as cli
    monkeypatch.setitem(cli.RUNNERS, "limits", lambda cfg: [{"id": "x", "status": "fail", "detail": "boom"}])
    code, out = _run(["limits"], capsys)
    assert code == 1 and "FAIL" in out and "boom" in out


@pytest.mark.parametrize("suite", ["check-transforms", "limits"])
def test_suites_pass_on_a2(suite, capsys):
    assert _run([suite, "--group", "a2"], capsys)[0] == 0


def test_weightfn_suite_n2(capsys):
    code, out = _run(["check-weightfn", "--n", "2"], capsys)
    assert code == 0 and "negative control" in out


def test_emit_table(tmp_path, capsys):
    out = tmp_path / "a1.json"
    assert _run(["table", "--group", "a1", "--emit", str(out)], capsys)[0] == 0
    assert len(json.loads(out.read_text())["entries"]) == 4


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ellischub", "check-identities", "--points", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "check-identities:" in r.stdout
