import json

import numpy as np
import pytest

from stablepoly.core.algebra import (
    QuotientRing,
    gcd,
    groebner_basis,
    has_common_factor,
    normal_form,
    rationalize,
    standard_monomials,
)
from stablepoly.core.bivpoly import BivPoly
from stablepoly.core.codec import format_poly, load_poly, parse_gaussian, parse_point, poly_from_dict
from stablepoly.core.homog import HomogForm, homog_divide, homog_expand
from stablepoly.core.scalars import Backend, exact, to_complex
from stablepoly.utils.errors import BackendMismatchError, InputFormatError, PreconditionError
from stablepoly.utils.numerics import cluster_multiple, make_rng, random_bidisk, random_torus


# ===== МНОГОЧЛЕНЫ =====

def test_reflection_of_p0(p0):
    assert p0.reflect().equals(BivPoly.from_expr("2*z1*z2 - z1 - z2"))


def test_reflection_uses_declared_bidegree(ex1):
    expected = BivPoly.from_expr("4*z1*z2**2 - z2**2 - 3*z1*z2 - z2 + z1", (1, 2))
    assert ex1.reflect().equals(expected)
    assert ex1.reflect().reflect().equals(ex1)


def test_constant_reflection_keeps_bidegree(one_12):
    assert one_12.bidegree == (1, 2)
    assert one_12.reflect().equals(BivPoly.from_expr("z1*z2**2", (1, 2)))


@pytest.mark.parametrize("name", ["p0", "ex1", "ex2", "ex3", "one_12"])
def test_reflection_modulus_on_torus_and_bidisk(name, request):
    p = request.getfixturevalue(name).to_float()
    q = p.reflect()
    rng = make_rng(5)
    z1, z2 = random_torus(1000, rng)
    on_torus = np.abs(p.eval(z1, z2))
    assert np.max(np.abs(np.abs(q.eval(z1, z2)) - on_torus) / np.maximum(1.0, on_torus)) < 1e-10
    # полуустойчивый p: |p~| <= |p| внутри бидиска
    w1, w2 = random_bidisk(1000, rng)
    assert np.all(np.abs(q.eval(w1, w2)) <= np.abs(p.eval(w1, w2)) + 1e-9)


def test_from_expr_rejects_monomial_outside_bidegree():
    with pytest.raises(InputFormatError):
        BivPoly.from_expr("z1**2", (1, 1))


def test_mixed_backends_raise(p0):
    with pytest.raises(BackendMismatchError):
        p0 + p0.to_float()


def test_multiplication_and_eval(p0):
    square = p0 * p0
    assert square.bidegree == (2, 2)
    assert abs(square.eval(0.5, 0.25) - (2 - 0.5 - 0.25) ** 2) < 1e-12


def test_exact_eval_on_torus_zero(ex1):
    assert ex1.eval_exact(exact(1), exact(1)) == exact(0)


def test_rotate_moves_zero(p0):
    # p(z1 u1, z2 u2) обращается в ноль в (conj u1, conj u2)
    rotated = p0.rotate(exact(0, 1), exact(0, -1))
    assert rotated.eval_exact(exact(0, -1), exact(0, 1)) == exact(0)


# ===== КОДЕК =====

def test_json_roundtrip_exact(tmp_path, ex3):
    path = tmp_path / "ex3.json"
    path.write_text(json.dumps(ex3.to_dict()), encoding="utf-8")
    assert load_poly(str(path)).equals(ex3)


def test_exact_coefficients_reject_floats():
    with pytest.raises(InputFormatError):
        poly_from_dict({"bidegree": [0, 0], "backend": "exact", "coeffs": [[0.5]]})


def test_row_length_checked():
    with pytest.raises(InputFormatError):
        poly_from_dict({"bidegree": [1, 1], "coeffs": [[1, 2], [3]]})


def test_load_poly_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(InputFormatError):
        load_poly(str(path))


@pytest.mark.parametrize("text, re, im", [
    ("3/5+4/5i", "3/5", "4/5"),
    ("-1", "-1", "0"),
    ("i", "0", "1"),
    ("1-2i", "1", "-2"),
    ("-i", "0", "-1"),
])
def test_parse_gaussian(text, re, im):
    assert parse_gaussian(text) == exact(re, im)


def test_parse_point_needs_two_coordinates():
    with pytest.raises(InputFormatError):
        parse_point("1")


def test_format_poly(p0):
    assert format_poly(p0) == "2 - z1 - z2"


# ===== ОДНОРОДНЫЕ РАЗЛОЖЕНИЯ =====

def test_expansion_of_ex1_at_one(ex1):
    expansion = homog_expand(ex1, (exact(1), exact(1)))
    assert expansion.order == 1
    assert expansion.form(1).terms == {(1, 0): exact(2), (0, 1): exact(2)}
    assert expansion.form(2).terms == {(1, 1): exact(-1), (0, 2): exact(1)}


def test_expansion_resubstitutes_to_original(ex3):
    expansion = homog_expand(ex3, (exact(1), exact(1)))
    assert expansion.resubstitute().terms == ex3.terms()


def test_expansion_point_must_be_on_torus(p0):
    with pytest.raises(PreconditionError):
        homog_expand(p0, (exact(1, 1), exact(1)))


def test_homog_divide_exact():
    # (ζ + η)(ζ - η) / (ζ + η) = ζ - η
    numer = HomogForm({(2, 0): exact(1), (0, 2): exact(-1)}, 2)
    denom = HomogForm({(1, 0): exact(1), (0, 1): exact(1)}, 1)
    quotient = homog_divide(numer, denom)
    assert quotient.terms == {(1, 0): exact(1), (0, 1): exact(-1)}


def test_homog_divide_reports_non_divisible():
    numer = HomogForm({(1, 1): exact(2)}, 2)
    denom = HomogForm({(1, 0): exact(1), (0, 1): exact(1)}, 1)
    assert homog_divide(numer, denom) is None


def test_homog_divide_float():
    numer = HomogForm({(2, 0): 1 + 0j, (1, 1): 2 + 0j, (0, 2): 1 + 0j}, 2, 2, Backend.FLOAT)
    denom = HomogForm({(1, 0): 1 + 0j, (0, 1): 1 + 0j}, 1, 2, Backend.FLOAT)
    quotient = homog_divide(numer, denom)
    assert quotient is not None
    assert abs(to_complex(quotient.terms[(1, 0)]) - 1) < 1e-12
    assert abs(to_complex(quotient.terms[(0, 1)]) - 1) < 1e-12


# ===== ТОЧНАЯ АЛГЕБРА =====

def test_gcd_with_reflection_is_trivial(p0):
    assert not has_common_factor(p0, p0.reflect())


def test_gcd_finds_common_factor():
    a = BivPoly.from_expr("(1 - z1)*(2 - z2)")
    b = BivPoly.from_expr("(1 - z1)*(3 + z2)")
    assert gcd(a, b).natural_bidegree == (1, 0)


def test_groebner_standard_monomials():
    basis = groebner_basis([BivPoly.from_expr("z1"), BivPoly.from_expr("z2**2")])
    assert standard_monomials(basis) == [(0, 0), (0, 1)]
    assert not normal_form(BivPoly.from_expr("z1*z2 + z2**2"), basis)


def test_quotient_ring_multiplicity():
    ring = QuotientRing([BivPoly.from_expr("z1"), BivPoly.from_expr("z2**2")])
    assert ring.dimension == 2
    assert ring.exact_multiplicity((exact(0), exact(0))) == 2
    assert ring.exact_multiplicity((exact(1), exact(0))) == 0


def test_float_multiplicity_separates_close_zeros():
    # два простых нуля на расстоянии 1e-3 не сливаются в один кластер
    ring = QuotientRing([BivPoly.from_expr("z1"), BivPoly.from_expr("z2*(z2 - 1/1000)")])
    assert ring.float_multiplicity((0, 0.001)) == 1
    assert ring.float_multiplicity((0, 0)) == 1
    assert ring.float_multiplicity((0, 0.0005)) == 0


def test_float_multiplicity_of_double_zero():
    ring = QuotientRing([BivPoly.from_expr("z1"), BivPoly.from_expr("z2**2")])
    assert ring.float_multiplicity((0, 0)) == 2
    assert ring.float_multiplicity((0.5, 0)) == 0


def test_cluster_multiple_keeps_scattered_triple_root():
    triple = 1 + 1e-4 * np.exp(2j * np.pi * np.arange(3) / 3)
    [(centre, k)] = cluster_multiple(triple, 1e-2, 1e-7, 1e-10)
    assert k == 3
    assert abs(centre - 1) < 1e-12
    # два простых корня на 1e-3 друг от друга разделяются
    pair = cluster_multiple([0.0, 0.001], 1e-2, 1e-7, 1e-10)
    assert sorted((c.real, k) for c, k in pair) == [(0.0, 1), (0.001, 1)]


def test_quotient_ring_rejects_curve():
    with pytest.raises(PreconditionError):
        QuotientRing([BivPoly.from_expr("z1*(1 - z2)"), BivPoly.from_expr("z1*(2 + z2)")])


def test_rationalize_snaps_small_denominators():
    p = BivPoly(np.array([[0.5 + 0j, 0.25 + 0j]]), Backend.FLOAT)
    q = rationalize(p, 1000, 1e-8)
    assert q.is_exact
    assert q.terms() == {(0, 0): exact("1/2"), (0, 1): exact("1/4")}
