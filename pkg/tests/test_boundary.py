import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.core.scalars import exact
from stablepoly.services.boundary import (
    ApproachRegion,
    bottom_form_check,
    nontangential_bounded,
    nontangential_limit,
    regularity_ladder,
    remainder_exponent,
    vanishing_order,
)
from stablepoly.utils.errors import InputFormatError, UnboundedError

ONE = (exact(1), exact(1))
MINUS_ONE = (exact(-1), exact(-1))


def test_p0_ladder(p0):
    analysis = regularity_ladder(p0, ONE)
    assert analysis.M == 1
    assert analysis.bottom_ok
    assert analysis.nu == exact(-1)
    assert analysis.regularity_k == 0
    assert analysis.intersection_multiplicity == 2
    assert analysis.floor_ok


def test_ex1_ladder_taylor_terms(ex1):
    analysis = regularity_ladder(ex1, ONE)
    assert analysis.nu == exact(-1)
    assert analysis.regularity_k == 2
    F1, F2 = analysis.taylor_terms
    assert F1.terms == {(0, 1): exact(2)}
    assert F2.terms == {(0, 2): exact(-1)}
    assert analysis.real_after_gauge
    assert analysis.intersection_multiplicity == 4
    assert analysis.multiplicity_floor == 4


def test_ex3_ladder(ex3):
    analysis = regularity_ladder(ex3, ONE)
    assert analysis.M == 1
    assert analysis.regularity_k == 4
    assert analysis.multiplicity_floor == 6
    assert analysis.floor_ok


@pytest.mark.parametrize("point, order", [(ONE, 2), (MINUS_ONE, 1)])
def test_ex2_float_ladder(ex2, point, order):
    assert vanishing_order(ex2, point) == order
    analysis = regularity_ladder(ex2, point, cross_check=False)
    assert analysis.M == order
    assert analysis.bottom_ok
    assert analysis.nu is not None
    assert analysis.regularity_k == 0


def test_k_max_caps_ladder(ex1):
    assert regularity_ladder(ex1, ONE, k_max=1, cross_check=False).regularity_k == 1


def test_negative_k_max_rejected(ex1):
    with pytest.raises(InputFormatError):
        regularity_ladder(ex1, ONE, k_max=-1)


def test_bottom_form_with_zero_in_half_plane():
    form, ok = bottom_form_check(BivPoly.from_expr("z1 - z2"), ONE)
    assert form.degree == 1
    assert not ok


def test_limits_and_boundedness(p0):
    assert nontangential_limit(p0.reflect(), p0, ONE) == exact(-1)
    assert nontangential_limit(BivPoly.from_expr("1 - z1"), p0, ONE) is None
    assert nontangential_bounded(BivPoly.from_expr("1 - z1"), p0, ONE)
    assert not nontangential_bounded(BivPoly.constant(1), p0, ONE)
    with pytest.raises(UnboundedError):
        nontangential_limit(BivPoly.constant(1), p0, ONE)


def test_remainder_exponent_follows_regularity(p0, ex1):
    assert remainder_exponent(p0, ONE, seed=1) == pytest.approx(1.0, abs=1e-6)
    assert remainder_exponent(ex1, ONE, seed=1) == pytest.approx(3.0, abs=0.2)


def test_approach_region():
    region = ApproachRegion(2.0)
    assert region.contains([1 + 0j, 1 + 0.2j])
    assert not region.contains([-1 + 0j, 1 + 0j])
    with pytest.raises(InputFormatError):
        ApproachRegion(1.0)


def test_rotated_point(p0):
    # p0(i z1, -i z2) обращается в ноль в (-i, i)
    rotated = p0.rotate(exact(0, 1), exact(0, -1))
    analysis = regularity_ladder(rotated, (exact(0, -1), exact(0, 1)), cross_check=False)
    assert analysis.M == 1
    assert analysis.nu == exact(-1)
