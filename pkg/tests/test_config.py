import json

import pytest

from stablepoly.config import load_config
from stablepoly.utils.errors import ConfigError, InputFormatError, NumericalFailure, StablePolyError


def test_overrides_are_case_insensitive(cfg):
    updated = cfg.with_overrides({"seed": 7, "L2_MAX_GRID": "512"})
    assert updated.SEED == 7
    assert updated.L2_MAX_GRID == 512


def test_tuple_override(cfg):
    updated = cfg.with_overrides({"RAY_EXPONENTS": [4, 5, 6]})
    assert updated.RAY_EXPONENTS == (4, 5, 6)


def test_unknown_key_rejected(cfg):
    with pytest.raises(ConfigError):
        cfg.with_overrides({"NO_SUCH_TOL": 1})


def test_bad_value_rejected(cfg):
    with pytest.raises(ConfigError):
        cfg.with_overrides({"L2_MAX_GRID": "many"})


def test_load_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"SHEAR_RETRIES": 9}), encoding="utf-8")
    assert load_config(str(path)).SHEAR_RETRIES == 9


def test_load_config_requires_object(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_echo_hides_database_url(cfg):
    echo = cfg.echo()
    assert "DB_URL" not in echo
    assert echo["AGLER_TOL"] == cfg.AGLER_TOL
    assert isinstance(echo["FR_LADDER"], list)


def test_error_payload_and_exit_codes():
    error = NumericalFailure("Нарушена теорема Безу", total=3, bezout=4)
    assert error.to_dict() == {
        "error": "NumericalFailure",
        "message": "Нарушена теорема Безу",
        "details": {"total": "3", "bezout": "4"},
    }
    assert error.exit_code == 4
    assert InputFormatError("x").exit_code == 2
    assert isinstance(ConfigError("x"), StablePolyError)
