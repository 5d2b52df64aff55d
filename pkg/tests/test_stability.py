import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.services.stability import check_semistable, require_semistable, require_stable
from stablepoly.utils.errors import PreconditionError


def test_p0_is_semistable(p0):
    report = check_semistable(p0)
    assert report.gcd_trivial
    assert report.zero_free_verified
    assert report.semistable


def test_examples_are_semistable(ex1, ex2, ex3):
    for p in (ex1, ex2, ex3):
        assert check_semistable(p).semistable


def test_zero_inside_disk_detected():
    report = check_semistable(BivPoly.from_expr("1 - 2*z1 + z2/4"))
    assert not report.semistable
    assert report.witnesses


def test_common_factor_with_reflection():
    # 1 - z1 совпадает со своим отражением с точностью до знака
    report = check_semistable(BivPoly.from_expr("(1 - z1)*(2 - z2)"))
    assert not report.gcd_trivial
    assert not report.semistable


def test_zero_polynomial_rejected():
    with pytest.raises(PreconditionError):
        check_semistable(BivPoly.zero(1, 1))


def test_require_semistable_raises():
    with pytest.raises(PreconditionError):
        require_semistable(BivPoly.from_expr("z1 - 1/2"))


def test_require_stable_distinguishes_boundary_zeros(p0, p4):
    require_stable(p4)
    with pytest.raises(PreconditionError):
        require_stable(p0)
