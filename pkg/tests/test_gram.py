import math

import numpy as np
import pytest

from stablepoly.core.bivpoly import BivPoly
from stablepoly.services.gram import gram_matrix, gram_model, weight_fourier
from stablepoly.utils.errors import PreconditionError


def test_weight_fourier_of_constant():
    coeffs = weight_fourier(BivPoly.constant(2), 8)
    assert coeffs[0, 0] == pytest.approx(0.25)
    assert np.max(np.abs(coeffs.ravel()[1:])) < 1e-12


def test_gram_matrix_is_hermitian(p4):
    coeffs = weight_fourier(p4.to_float(), 64)
    H = gram_matrix(coeffs, [(0, 0), (1, 0), (0, 1), (1, 1)])
    assert np.allclose(H, H.conj().T, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(H) > 0)


@pytest.mark.slow
def test_stable_model_matches_intersections(p4):
    model = gram_model(p4)
    assert model.dim_G == model.dim_formula == 1
    assert model.dim_match
    [(z1, z2)] = model.joint_eigenvalues
    expected = 2 - math.sqrt(3)
    assert abs(z1 - expected) < 1e-6
    assert abs(z2 - expected) < 1e-6
    assert model.spectrum_match


def test_boundary_zero_rejected(p0):
    with pytest.raises(PreconditionError):
        gram_model(p0)
