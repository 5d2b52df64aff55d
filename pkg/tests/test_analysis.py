from stablepoly.core.bivpoly import BivPoly
from stablepoly.services import analysis
from stablepoly.services.analysis import VERSION, analyze
from stablepoly.utils.errors import NumericalFailure


def _checks(bundle):
    return {c.name: c for c in bundle.checks}


def test_p0_bundle(p0, cfg):
    bundle = analyze(p0, seed=11, cfg=cfg)
    checks = _checks(bundle)
    for name in ("semistable", "bezout", "torus_even", "dim_G", "codimension",
                 "reflection_in_ideal", "bottom_form@(1, 1)", "multiplicity_floor@(1, 1)",
                 "multiplicity_oracles@(1, 1)"):
        assert checks[name].passed, name
    assert "gram_spectrum" not in checks
    report = bundle.to_dict()
    assert report["version"] == VERSION
    assert report["seed"] == 11
    assert report["config"]["SEED"] == 11
    assert report["status"] in ("PASS", "FAIL")
    assert [b["M"] for b in report["boundary"]] == [1]


def test_stable_bundle_runs_gram(p4, cfg):
    checks = _checks(analyze(p4, cfg=cfg))
    assert checks["gram_dim"].passed
    assert checks["dim_G"].passed
    assert checks["codimension"].passed


def test_not_semistable_stops_early(cfg):
    bundle = analyze(BivPoly.from_expr("z1 - 1/2"), cfg=cfg)
    assert [c.name for c in bundle.checks] == ["semistable"]
    assert not bundle.ok
    assert bundle.to_dict()["status"] == "FAIL"


def test_codimension_failure_does_not_abort(p0, cfg, monkeypatch):
    def broken(*args, **kwargs):
        raise NumericalFailure("сбой коразмерности")

    monkeypatch.setattr(analysis, "codimension", broken)
    bundle = analyze(p0, seed=11, cfg=cfg)
    checks = _checks(bundle)
    assert not checks["codimension"].passed
    assert checks["codimension"].detail["error"] == "NumericalFailure"
    # следующие шаги выполнены
    assert checks["reflection_in_ideal"].passed
    assert "bottom_form@(1, 1)" in checks
