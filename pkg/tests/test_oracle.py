import csv

import numpy as np
import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.core.scalars import exact
from stablepoly.services.oracle import (
    Verdict,
    export_csv,
    fourier_report,
    l2_quadrature,
    multiplicity_crosscheck,
    resultant_multiplicity,
)
from stablepoly.utils.errors import PreconditionError

ORIGIN = (exact(0), exact(0))
ONE = (exact(1), exact(1))


def test_resultant_multiplicity_monomials():
    assert resultant_multiplicity(BivPoly.from_expr("z1"), BivPoly.from_expr("z2**2"), ORIGIN, seed=1) == 2


def test_resultant_multiplicity_ex1(ex1):
    assert resultant_multiplicity(ex1, ex1.reflect(), ONE, seed=5) == 4


def test_resultant_needs_exact(p0):
    with pytest.raises(PreconditionError):
        resultant_multiplicity(p0.to_float(), p0.reflect().to_float(), ONE)


def test_crosscheck_table(p0):
    table = multiplicity_crosscheck(p0, p0.reflect(), ONE, seed=2)
    assert table["eigenspace"] == table["fulton"] == table["resultant"] == 2
    assert table["agree"]


def test_zero_numerator_converges(p0):
    verdict = l2_quadrature(BivPoly.zero(0, 0), p0, max_grid=256)
    assert verdict.verdict is Verdict.CONVERGENT


@pytest.mark.slow
def test_goodman_quotients(p0, goodman):
    assert l2_quadrature(goodman["G1"], p0).verdict is Verdict.CONVERGENT
    assert l2_quadrature(goodman["G2"], p0).verdict is Verdict.CONVERGENT
    assert l2_quadrature(goodman["G3"], p0).verdict is Verdict.DIVERGENT


@pytest.mark.slow
def test_stable_denominator_converges(p4):
    assert l2_quadrature(BivPoly.constant(1), p4, max_grid=512).verdict is Verdict.CONVERGENT


def test_fourier_coefficients_of_stable_quotient(p4):
    # 1/(4 - z1 - z2) = Σ C(j+k, j) z1^j z2^k / 4^(j+k+1)
    report = fourier_report(BivPoly.constant(1), p4, (16, 16))
    assert report.coefficients.shape == (17, 17)
    assert report.coefficients[0, 0] == pytest.approx(0.25)
    assert report.coefficients[1, 1] == pytest.approx(2 / 64)
    assert report.coefficients[3, 0] == pytest.approx(1 / 256)
    assert report.trends["l1"].plateau


def test_fourier_nyquist_guard(p4):
    with pytest.raises(PreconditionError):
        fourier_report(BivPoly.constant(1), p4, (64, 64), grid=64)


def test_export_csv(tmp_path, p0, goodman):
    report = fourier_report(goodman["G2"], p0, (4, 2))
    path = export_csv(report, str(tmp_path / "coeffs.csv"))
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["j", "k", "re", "im", "abs"]
    assert len(rows) == 1 + 5 * 3
    values = np.array([float(r[4]) for r in rows[1:]])
    assert np.all(np.isfinite(values))
