import math
from fractions import Fraction

import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.core.scalars import exact
from stablepoly.services.intersect import (
    INFINITY,
    Region,
    classify,
    common_zeros,
    fulton_reduce,
    joint_spectrum_points,
    multiplicity,
    reflection_pair,
    torus_multiplicity_total,
)
from stablepoly.utils.errors import BackendMismatchError, PreconditionError

ONE = (exact(1), exact(1))


def test_p0_meets_reflection_only_at_one(p0):
    report = reflection_pair(p0)
    assert report.total == report.bezout == 2
    assert report.torus_total == 2
    [zero] = report.zeros
    assert zero.exact
    assert zero.point == ONE
    assert zero.multiplicity == 2
    assert zero.region is Region.TORUS


def test_ex1_torus_count(ex1):
    report = reflection_pair(ex1)
    assert report.bezout == 4
    assert report.torus_total == 4
    assert multiplicity(ex1, ex1.reflect(), ONE) == 4


def test_ex3_multiplicity(ex3):
    assert multiplicity(ex3, ex3.reflect(), ONE) == 6
    assert reflection_pair(ex3).torus_total == 6


def test_constant_meets_reflection_at_infinity(one_12):
    report = reflection_pair(one_12)
    assert report.total == 4
    assert report.torus_total == 0
    regions = {z.region for z in report.zeros}
    assert regions <= {Region.D_DINV, Region.DINV_D}


def test_monomial_pair_at_origin():
    f, g = BivPoly.from_expr("z1"), BivPoly.from_expr("z2**2")
    report = common_zeros(f, g)
    assert report.total == 2
    assert multiplicity(f, g, (exact(0), exact(0))) == 2
    assert multiplicity(f, g, (exact(1), exact(0))) == 0


def test_float_monomial_pair_at_origin():
    f, g = BivPoly.from_expr("z1").to_float(), BivPoly.from_expr("z2**2").to_float()
    report = common_zeros(f, g)
    assert report.total == 2
    [zero] = report.zeros
    assert zero.multiplicity == 2
    assert max(abs(c) for c in zero.complex_point()) < 1e-6


def test_float_constant_meets_reflection_at_infinity(one_12):
    report = reflection_pair(one_12.to_float())
    assert report.total == report.bezout == 4
    assert report.torus_total == 0


def test_float_lines_meet_at_infinity():
    f = BivPoly.from_expr("z1 + z2").to_float()
    g = BivPoly.from_expr("z1 - z2 - 1/7").to_float()
    report = common_zeros(f, g)
    assert report.total == report.bezout == 2
    assert any(z.point == (INFINITY, INFINITY) for z in report.zeros)


@pytest.mark.parametrize("gap", ["1/100", "1/1000"])
def test_close_zeros_stay_apart(gap):
    f, g = BivPoly.from_expr("z1"), BivPoly.from_expr(f"z2*(z2 - {gap})")
    step = float(Fraction(gap))
    for report in (common_zeros(f, g), common_zeros(f.to_float(), g.to_float())):
        assert report.total == 2
        seconds = sorted(z.complex_point()[1].real for z in report.zeros)
        assert seconds == pytest.approx([0.0, step], abs=1e-8)
        assert all(z.multiplicity == 1 for z in report.zeros)


@pytest.mark.slow
def test_ex2_float_multiplicities(ex2):
    report = reflection_pair(ex2)
    assert report.total == report.bezout == 8
    found = {}
    for zero in report.zeros:
        z1, z2 = zero.complex_point()
        found[(round(z1.real), round(z2.real))] = zero.multiplicity
    assert found == {(1, 1): 6, (-1, -1): 2}
    assert report.torus_total == 8


def test_fulton_agrees_with_eigenspaces(ex1):
    assert fulton_reduce(ex1, ex1.reflect(), ONE) == 4
    assert fulton_reduce(BivPoly.from_expr("z1"), BivPoly.from_expr("z2**2"), (exact(0), exact(0))) == 2


def test_fulton_needs_finite_point(p0):
    with pytest.raises(PreconditionError):
        fulton_reduce(p0, p0.reflect(), (INFINITY, exact(0)))


def test_torus_total_two_ways(p0, p4):
    assert torus_multiplicity_total(p0) == 2
    assert torus_multiplicity_total(p4) == 0


def test_joint_spectrum_point_of_stable(p4):
    [zero] = joint_spectrum_points(p4)
    expected = 2 - math.sqrt(3)
    z1, z2 = zero.complex_point()
    assert abs(z1 - expected) < 1e-8
    assert abs(z2 - expected) < 1e-8
    assert zero.multiplicity == 1


def test_common_factor_rejected():
    a = BivPoly.from_expr("(1 - z1)*(2 - z2)")
    b = BivPoly.from_expr("(1 - z1)*(3 + z2)")
    with pytest.raises(PreconditionError):
        common_zeros(a, b)


def test_backends_must_match(p0):
    with pytest.raises(BackendMismatchError):
        common_zeros(p0, p0.reflect().to_float())


@pytest.mark.parametrize("point, region", [
    ((0.5, 0.5), Region.DD),
    ((0.5, 2.0), Region.D_DINV),
    ((1.0, -1.0), Region.TORUS),
    ((INFINITY, 0.0), Region.DINV_D),
    ((1.0, 0.5), Region.OTHER),
])
def test_classify(point, region):
    assert classify(point, 1e-8) is region
