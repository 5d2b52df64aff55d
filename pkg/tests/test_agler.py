import numpy as np
import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.services.agler import (
    alternate_pair,
    canonical_system,
    eont_residual,
    realize,
    verify_agler,
)
from stablepoly.services import agler
from stablepoly.utils.errors import NumericalFailure, PreconditionError


def _torus(count=64, seed=7):
    rng = np.random.default_rng(seed)
    return np.exp(2j * np.pi * rng.random(count)), np.exp(2j * np.pi * rng.random(count))


def test_p0_canonical_system(p0, cfg):
    system = canonical_system(p0, cfg)
    z1, z2 = _torus()
    assert np.allclose(system.E1.norm2_many(z1, z2), 2 * np.abs(1 - z2) ** 2, atol=1e-6)
    assert np.allclose(system.E2.norm2_many(z1, z2), 2 * np.abs(1 - z1) ** 2, atol=1e-6)
    assert system.dim_G == 0
    assert system.unique_pair
    assert system.identity_residual < 1e-6


def test_ex1_canonical_system(ex1, cfg):
    system = canonical_system(ex1, cfg)
    z1, z2 = _torus()
    # E1 = 2(1 - z2)², E2 = 2((1 - z1)(1 - z2), √2(1 - z1 z2))
    assert np.allclose(system.E1.norm2_many(z1, z2), 4 * np.abs(1 - z2) ** 4, atol=1e-7)
    e2 = 4 * np.abs((1 - z1) * (1 - z2)) ** 2 + 8 * np.abs(1 - z1 * z2) ** 2
    assert np.allclose(system.E2.norm2_many(z1, z2), e2, atol=1e-7)
    assert system.dim_G == 0


def test_swapped_bidegree(ex3, cfg):
    system = canonical_system(ex3, cfg)
    assert system.swapped
    assert system.E1.dim == 3
    assert system.E2.dim == 1
    z1, z2 = _torus()
    assert np.allclose(system.E2.norm2_many(z1, z2), 2 * np.abs(1 - z1) ** 6, atol=1e-7)


def test_stable_polynomial_has_nontrivial_G(p4, cfg):
    system = canonical_system(p4, cfg)
    assert system.dim_G == 1
    assert not system.unique_pair


def test_alternate_pair_satisfies_identity(ex1, cfg):
    F1, E2 = alternate_pair(ex1, cfg=cfg)
    assert verify_agler(ex1, F1, E2) <= cfg.AGLER_TOL * 64


def test_exact_identity_for_p0(p0):
    # |p|² - |p̃|² = 2(1-|z1|²)|1-z2|² + 2(1-|z2|²)|1-z1|²
    s = BivPoly.from_expr("1 - z2")
    t = BivPoly.from_expr("1 - z1")
    assert verify_agler(p0, [s, s], [t, t]) == 0.0


def test_exact_identity_detects_wrong_pair(p0):
    assert verify_agler(p0, [BivPoly.from_expr("1 - z2")], [BivPoly.from_expr("1 - z1")]) > 0


def test_eont_residual(ex1, cfg):
    assert eont_residual(ex1, samples=200, seed=3, cfg=cfg) < 1e-7


@pytest.mark.parametrize("name", ["p0", "ex1", "p4"])
def test_realization_is_unitary(name, request, cfg):
    p = request.getfixturevalue(name)
    system = canonical_system(p, cfg)
    real = realize(p, system.E1, system.F2, cfg)
    assert real.unitarity_residual <= cfg.UNITARY_TOL
    assert real.transfer_residual <= cfg.TRANSFER_TOL
    value = real.transfer(0.3, -0.2j)
    assert value == pytest.approx(complex(p.reflect().eval(0.3, -0.2j) / p.eval(0.3, -0.2j)))


def test_not_semistable_rejected():
    with pytest.raises(PreconditionError):
        canonical_system(BivPoly.from_expr("z1 - 1/2"))


def test_broken_identity_raises_only_when_checked(p0, cfg, monkeypatch):
    monkeypatch.setattr(agler, "verify_agler", lambda p, a1, a2: 1.0)
    with pytest.raises(NumericalFailure):
        canonical_system(p0, cfg)
    # без проверки система возвращается, невязку оценивает вызывающий
    system = canonical_system(p0, cfg, check=False)
    assert system.identity_residual == pytest.approx(1.0)
