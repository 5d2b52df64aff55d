import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.services.ideal import (
    MembershipMode,
    _doubling_growth,
    codimension,
    dim_P,
    generators,
    interreduce,
    linfty_multiplier,
    local_conditions,
    membership,
    multiplier_sup,
)
from stablepoly.utils.errors import PreconditionError


@pytest.fixture
def q_one_minus_z1():
    return BivPoly.from_expr("1 - z1")


def test_p0_generators(p0):
    description = generators(p0)
    assert description.torus_count == 2
    assert description.exact_generators is not None
    assert codimension(p0, description) == 1
    assert description.dim_formula(1, 1) == 3


def test_stable_polynomial_ideal_is_whole_ring(p4):
    description = generators(p4)
    assert description.torus_count == 0
    assert codimension(p4, description) == 0
    assert membership(p4, BivPoly.constant(1), description=description).member


@pytest.mark.parametrize("name, j, k, expected", [
    ("p0", 1, 1, 3),
    ("p0", 3, 2, 11),
    ("ex1", 0, 1, 0),
    ("ex1", 2, 3, 10),
    ("ex3", 2, 0, 0),
    ("p4", 0, 0, 1),
])
def test_dim_P(name, j, k, expected, request):
    assert dim_P(request.getfixturevalue(name), j, k) == expected


def test_dim_P_refuses_small_degrees(ex1):
    with pytest.raises(PreconditionError):
        dim_P(ex1, 0, 0)


def test_ex1_codimension_and_membership(ex1, p0):
    description = generators(ex1)
    assert description.torus_count == 4
    assert codimension(ex1, description) == 2
    assert membership(ex1, p0, description=description).member
    assert membership(ex1, BivPoly.from_expr("(1 - z2)**2"), description=description).member
    assert not membership(ex1, BivPoly.from_expr("1 - z1"), description=description).member


def test_ex3_codimension(ex3):
    description = generators(ex3)
    assert description.torus_count == 6
    assert codimension(ex3, description) == 3


def test_exact_membership_p0(p0, q_one_minus_z1):
    assert membership(p0, q_one_minus_z1).member
    result = membership(p0, BivPoly.constant(1))
    assert not result.member
    assert result.mode is MembershipMode.EXACT
    assert not result.local_ok


def test_reflection_always_in_ideal(ex1):
    assert membership(ex1, ex1.reflect()).member


def test_numeric_membership_p0(p0, q_one_minus_z1):
    member = membership(p0, q_one_minus_z1, MembershipMode.NUMERIC)
    assert member.member
    assert member.growth < 0.05
    outsider = membership(p0, BivPoly.constant(1), MembershipMode.NUMERIC)
    assert not outsider.member
    # c растёт примерно вчетверо при каждом удвоении сетки
    assert outsider.growth > 0.5


def test_growth_uses_every_doubling():
    # рост на ранних сетках не прячется за плато на последней паре
    early = [(64, 1.0), (128, 4.0), (256, 16.0), (512, 16.1)]
    assert _doubling_growth(early) > 0.5
    flat = [(64, 2.0), (128, 2.0), (256, 2.0)]
    assert _doubling_growth(flat) == pytest.approx(0.0, abs=1e-12)
    assert _doubling_growth([(64, 0.0), (128, 0.0)]) == 0.0
    assert _doubling_growth([(64, 3.0)]) == 0.0


def test_float_q_falls_back_to_numeric(p0, q_one_minus_z1):
    result = membership(p0, q_one_minus_z1.to_float(), MembershipMode.EXACT)
    assert result.mode is MembershipMode.NUMERIC
    assert result.fallback
    assert result.member


def test_local_conditions(p0, q_one_minus_z1):
    [condition] = local_conditions(p0, q_one_minus_z1)
    assert condition.multiplicity == 2
    assert condition.p_order == 1
    assert condition.q_order == 1
    assert condition.ok


def test_interreduce_removes_redundant_generator():
    gens = [BivPoly.from_expr("1 - z1"), BivPoly.from_expr("1 - z2"), BivPoly.from_expr("2 - z1 - z2")]
    reduced, approximate = interreduce(gens)
    assert len(reduced) == 2
    assert not approximate


def test_interreduce_marks_float_input():
    _, approximate = interreduce([BivPoly.from_expr("1 - z1").to_float(), BivPoly.from_expr("1 - z2")])
    assert approximate


def test_linfty_multipliers_p0(p0):
    g, h = linfty_multiplier(p0)
    assert g.equals(BivPoly.from_expr("1 - z2"))
    assert h.equals(BivPoly.from_expr("1 - z1"))


def test_multiplier_sup_is_stable(p0):
    check = multiplier_sup(p0, generators(p0), grid=256)
    assert check.grids == (256, 512)
    assert check.stable
