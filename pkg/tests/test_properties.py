"""
Свойства на наборах многочленов с фиксированным seed.

Долгие: все тесты помечены slow.
"""
from functools import lru_cache

import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.services.agler import canonical_system, eont_residual
from stablepoly.services.gram import gram_model
from stablepoly.services.ideal import MembershipMode, generators, membership
from stablepoly.services.intersect import Region, reflection_pair
from stablepoly.services.oracle import Verdict, l2_quadrature, multiplicity_crosscheck
from stablepoly.utils.numerics import make_rng

pytestmark = pytest.mark.slow

ATOMS = ["2 - z1 - z2", "4 - z1 - z2", "2 - z1", "3 - z2", "3 - z1*z2"]

# (знаменатель, числитель, принадлежит ли идеалу)
MEMBERSHIP_CASES = [
    ("2 - z1 - z2", "(1 - z1)**8 * (1 - z2)**8", True),
    ("2 - z1 - z2", "(1 - z1)*(1 - z2)", True),
    ("2 - z1 - z2", "z1*(1 - z1)*(1 - z2)", True),
    ("2 - z1 - z2", "z2*(1 - z1)*(1 - z2)", True),
    ("2 - z1 - z2", "z1*z2*(1 - z1)*(1 - z2)", True),
    ("2 - z1 - z2", "(1 - z1)**2", True),
    ("2 - z1 - z2", "(1 - z2)**2", True),
    ("2 - z1 - z2", "2", False),
    ("2 - z1 - z2", "z1", False),
    ("2 - z1 - z2", "z2", False),
    ("2 - z1 - z2", "z1*z2", False),
    ("2 - z1 - z2", "1 + z1", False),
    ("2 - z1 - z2", "3 - z1", False),
    ("4 - z1 - z2", "1", True),
    ("4 - z1 - z2", "z1", True),
    ("4 - z1 - z2", "z2", True),
    ("4 - z1 - z2", "z1*z2", True),
    ("4 - z1 - z2", "z1**2", True),
    ("4 - z1 - z2", "1 - z1", True),
    ("4 - z1 - z2", "4 - z1 - z2", True),
]


def _products(count: int, seed: int):
    """Произведения 1-3 атомов с бистепенью от (1, 1) до (3, 3)"""
    rng = make_rng(seed)
    out = []
    while len(out) < count:
        picks = rng.integers(0, len(ATOMS), size=int(rng.integers(1, 4)))
        p = BivPoly.constant(1)
        for i in picks:
            p = p * BivPoly.from_expr(ATOMS[i])
        n, m = p.bidegree
        if 1 <= n <= 3 and 1 <= m <= 3:
            out.append(p)
    return out


@lru_cache(maxsize=None)
def _description(text: str):
    return generators(BivPoly.from_expr(text))


@pytest.mark.parametrize("p", _products(50, 20240601), ids=str)
def test_reflection_pair_counts(p):
    report = reflection_pair(p)
    n, m = p.bidegree
    assert report.total == report.bezout == 2 * n * m
    assert report.torus_total % 2 == 0


@pytest.mark.parametrize("name, tol", [
    ("p0", "AGLER_TOL"),
    ("p4", "AGLER_TOL"),
    ("ex1", "FR_TOL"),
    ("ex3", "FR_TOL"),
])
def test_agler_identity_residual(name, tol, cfg, request):
    p = request.getfixturevalue(name)
    system = canonical_system(p, cfg)
    assert system.identity_residual <= getattr(cfg, tol) * max(1.0, p.norm() ** 2)


@pytest.mark.parametrize("name, tol", [("p0", 1e-8), ("p4", 1e-8), ("ex1", 1e-7)])
def test_eont_on_torus_samples(name, tol, cfg, request):
    p = request.getfixturevalue(name)
    assert eont_residual(p, samples=1000, seed=3, cfg=cfg) <= tol * max(1.0, p.norm() ** 2)


@pytest.mark.parametrize("name", ["p0", "ex1", "ex3"])
def test_multiplicity_oracles_agree_on_torus(name, cfg, request):
    p = request.getfixturevalue(name)
    zeros = [z for z in reflection_pair(p, cfg).in_region(Region.TORUS) if z.exact]
    assert zeros
    for zero in zeros:
        table = multiplicity_crosscheck(p, p.reflect(), zero.point, seed=5, cfg=cfg)
        assert table["agree"], table
        assert table["eigenspace"] == zero.multiplicity


@pytest.mark.parametrize("text", [
    "4 - z1 - z2",
    "3 - z1 - z2",
    "5 - z1 - 2*z2",
    "6 - 2*z1 - z2 - z1*z2",
    "3 + z1 + z2",
])
def test_gram_model_of_stable_polynomials(text):
    model = gram_model(BivPoly.from_expr(text))
    assert model.dim_match
    assert model.spectrum_match


@pytest.mark.parametrize("p_text, q_text, member", MEMBERSHIP_CASES)
def test_membership_modes_agree(p_text, q_text, member):
    p, q = BivPoly.from_expr(p_text), BivPoly.from_expr(q_text)
    exact_result = membership(p, q, MembershipMode.EXACT, _description(p_text))
    assert exact_result.mode is MembershipMode.EXACT
    assert exact_result.member is member
    assert membership(p, q, MembershipMode.NUMERIC).member is member


@pytest.mark.parametrize("p_text, q_text, member", MEMBERSHIP_CASES)
def test_l2_quadrature_matches_membership(p_text, q_text, member):
    verdict = l2_quadrature(BivPoly.from_expr(q_text), BivPoly.from_expr(p_text)).verdict
    assert (verdict is Verdict.CONVERGENT) is member
