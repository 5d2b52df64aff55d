import numpy as np
import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.core.matpoly import LaurentMat, unit_circle
from stablepoly.services.factorization import build_T1, factor_residual, fejer_riesz
from stablepoly.utils.errors import PreconditionError


def test_T1_of_p0(p0):
    # T1(z2) = 2|1 - z2|² на окружности
    T = build_T1(p0)
    zs = unit_circle(16, 0.25)
    values = T.eval_many(zs)[:, 0, 0]
    assert np.allclose(values, 2 * np.abs(1 - zs) ** 2)


def test_scalar_factor_with_torus_root(p0):
    T = build_T1(p0)
    E = fejer_riesz(T)
    assert factor_residual(T, E, 256) < 1e-6
    assert abs(E.eval(-1.0)[0, 0]) ** 2 == pytest.approx(8.0)
    assert abs(E.eval(1.0)[0, 0]) < 1e-6


def test_matrix_factor_of_stable_polynomial():
    p = BivPoly.from_expr("(4 - z1 - z2)*(5 - z1 + z2)")
    T = build_T1(p)
    assert T.size == 2
    E = fejer_riesz(T)
    assert factor_residual(T, E, 512) < 1e-6
    roots = E.det_roots()
    assert np.all(np.abs(roots) >= 1 - 1e-6)


def test_indefinite_symbol_rejected():
    T = LaurentMat(np.array([[[-1.0 + 0j]]]))
    with pytest.raises(PreconditionError):
        fejer_riesz(T)


def test_non_hermitian_symbol_rejected():
    T = LaurentMat(np.array([[[1.0 + 0j]], [[3.0 + 0j]], [[0.0 + 0j]]]))
    with pytest.raises(PreconditionError):
        fejer_riesz(T)
