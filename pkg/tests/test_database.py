import pytest

from stablepoly.database import Database, input_hash
from stablepoly.init_db import init_database


@pytest.fixture
def db(tmp_path):
    database = Database(f"sqlite:///{tmp_path / 'runs.db'}")
    database.create_tables()
    return database


def test_input_hash_is_canonical():
    assert input_hash({"a": 1, "b": [1, 2]}) == input_hash({"b": [1, 2], "a": 1})
    assert input_hash({"a": 1}) != input_hash({"a": 2})


def test_save_and_read_run(db):
    run_id = db.save_run("dim", {"file": "p0"}, 5, "PASS", 0, {"dim": 3}, {"SEED": 5})
    run = db.get_run(run_id)
    assert run.command == "dim"
    assert run.report == {"dim": 3}
    assert run.input_hash == input_hash({"file": "p0"})
    assert run.summary()["status"] == "PASS"


def test_list_runs_newest_first(db):
    first = db.save_run("dim", {"file": "a"}, 1, "PASS", 0, {}, {})
    second = db.save_run("zeros", {"file": "b"}, 1, "FAIL", 4, {}, {})
    assert [r.id for r in db.list_runs()] == [second, first]
    assert [r.id for r in db.list_runs(input_hash({"file": "a"}))] == [first]
    assert len(db.list_runs(limit=1)) == 1


def test_find_cached_only_passing_runs(db):
    payload = {"file": "p0"}
    assert db.find_cached(input_hash(payload), "analyze", 1) is None
    db.save_run("analyze", payload, 1, "FAIL", 4, {"status": "FAIL"}, {})
    assert db.find_cached(input_hash(payload), "analyze", 1) is None
    ok = db.save_run("analyze", payload, 1, "PASS", 0, {"status": "PASS"}, {})
    assert db.find_cached(input_hash(payload), "analyze", 1).id == ok
    assert db.find_cached(input_hash(payload), "analyze", 2) is None


def test_init_database(tmp_path):
    assert init_database(f"sqlite:///{tmp_path / 'fresh.db'}")
