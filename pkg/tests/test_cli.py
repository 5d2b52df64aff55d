import json

import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.main import run


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_dim_command(p0, poly_file, capsys):
    code = run(["dim", "-f", poly_file(p0), "--j", "1", "--k", "1"])
    assert code == 0
    payload = _json(capsys)
    assert payload["status"] == "PASS"
    assert payload["result"]["dim"] == 3
    assert "config" in payload


def test_text_output(p0, poly_file, capsys):
    assert run(["--out", "text", "dim", "-f", poly_file(p0), "--j", "1", "--k", "1"]) == 0
    assert "dim: 3" in capsys.readouterr().out


def test_missing_file_is_input_error(tmp_path, capsys):
    code = run(["dim", "-f", str(tmp_path / "absent.json"), "--j", "1", "--k", "1"])
    assert code == 2
    payload = _json(capsys)
    assert payload["status"] == "ERROR"
    assert payload["result"]["error"] == "InputFormatError"


def test_precondition_exit_code(ex1, poly_file, capsys):
    assert run(["dim", "-f", poly_file(ex1), "--j", "0", "--k", "0"]) == 3
    assert _json(capsys)["result"]["error"] == "PreconditionError"


def test_bad_config_file(tmp_path, p0, poly_file, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"NOPE": 1}), encoding="utf-8")
    assert run(["--config", str(cfg), "dim", "-f", poly_file(p0), "--j", "1", "--k", "1"]) == 2
    assert _json(capsys)["error"] == "ConfigError"


def test_zeros_command(p0, poly_file, capsys):
    assert run(["zeros", "-f", poly_file(p0)]) == 0
    result = _json(capsys)["result"]
    assert result["torus_total"] == 2
    assert result["zeros"][0]["point"] == ["1", "1"]


def test_member_command(p0, poly_file, capsys):
    q = poly_file(BivPoly.from_expr("1 - z1"), "q.json")
    assert run(["member", "-f", poly_file(p0), "--q", q]) == 0
    assert _json(capsys)["result"]["member"] is True


def test_boundary_command(ex1, poly_file, capsys):
    assert run(["boundary", "-f", poly_file(ex1), "--point", "1,1"]) == 0
    result = _json(capsys)["result"]
    assert result["regularity_k"] == 2
    assert result["nu"] == ["-1", "0"]


def test_oracle_mult_command(p0, poly_file, capsys):
    assert run(["--seed", "3", "oracle", "mult", "-f", poly_file(p0), "--point", "1,1"]) == 0
    payload = _json(capsys)
    assert payload["result"]["agree"] is True
    assert payload["config"]["SEED"] == 3


def test_archive_and_history(tmp_path, p0, poly_file, capsys):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    path = poly_file(p0)
    assert run(["--archive", url, "dim", "-f", path, "--j", "1", "--k", "1"]) == 0
    capsys.readouterr()
    assert run(["--archive", url, "history"]) == 0
    runs = _json(capsys)["runs"]
    assert len(runs) == 1
    assert runs[0]["command"] == "dim"
    assert runs[0]["status"] == "PASS"


def test_reuse_returns_archived_report(tmp_path, p0, poly_file, capsys):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    args = ["dim", "-f", poly_file(p0), "--j", "1", "--k", "1"]
    assert run(["--archive", url] + args) == 0
    first = _json(capsys)
    assert run(["--archive", url, "--reuse"] + args) == 0
    assert _json(capsys) == first
    assert run(["--archive", url, "history"]) == 0
    assert len(_json(capsys)["runs"]) == 1


def test_reuse_respects_config(tmp_path, p0, poly_file, capsys):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"FR_TOL": 1e-5}), encoding="utf-8")
    args = ["dim", "-f", poly_file(p0), "--j", "1", "--k", "1"]
    assert run(["--archive", url] + args) == 0
    capsys.readouterr()
    # другие допуски: архивный отчёт не подходит
    assert run(["--archive", url, "--reuse", "--config", str(cfg)] + args) == 0
    capsys.readouterr()
    assert run(["--archive", url, "--reuse", "--config", str(cfg)] + args) == 0
    capsys.readouterr()
    assert run(["--archive", url, "history"]) == 0
    runs = _json(capsys)["runs"]
    assert len(runs) == 2
    assert len({r["input_hash"] for r in runs}) == 2


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        run(["frobnicate"])
