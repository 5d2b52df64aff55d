"""
Численная модель пространства L²(1/|p|²) для p без нулей на замкнутом бидиске.

Грам мономов считается по коэффициентам Фурье веса (двумерное FFT на
сетке тора), сжатые операторы умножения T1, T2* действуют на G = P_{n-1,m-1}.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh, null_space, schur

from ..config import config as default_config
from ..core.bivpoly import BivPoly
from ..core.matpoly import unit_circle
from ..core.vecpoly import VecPoly, pad_kernel
from .agler import canonical_system
from .intersect import joint_spectrum_points, torus_multiplicity_total
from .stability import require_stable

logger = logging.getLogger(__name__)

MIX = 0.5773502691896258 + 0.3141592653589793j


@dataclass
class GramModel:
    grid: int
    gram_change: float
    dim_G: int
    dim_formula: int
    joint_eigenvalues: List[Tuple[complex, complex]]
    expected_points: List[Tuple[complex, complex]]
    spectrum_error: float
    e1_kernel_deviation: float
    bases: Dict[str, VecPoly] = field(default_factory=dict, repr=False)

    @property
    def spectrum_match(self) -> bool:
        return self.spectrum_error <= default_config.EIGEN_CLUSTER_TOL

    @property
    def dim_match(self) -> bool:
        return self.dim_G == self.dim_formula

    def to_dict(self) -> Dict[str, Any]:
        return {
            "grid": self.grid,
            "gram_change": self.gram_change,
            "dim_G": self.dim_G,
            "dim_formula": self.dim_formula,
            "dim_match": self.dim_match,
            "joint_eigenvalues": [list(pt) for pt in self.joint_eigenvalues],
            "expected_points": [list(pt) for pt in self.expected_points],
            "spectrum_error": self.spectrum_error,
            "spectrum_match": self.spectrum_match,
            "e1_kernel_deviation": self.e1_kernel_deviation,
            "bases": {k: v.to_dict() for k, v in self.bases.items()},
        }


def weight_fourier(p: BivPoly, grid: int) -> np.ndarray:
    """ŵ(j, k) = ∫ |p|^-2 conj(z1)^j conj(z2)^k dσ, индексы по модулю grid"""
    zs = unit_circle(grid)
    values = p.eval_grid(zs, zs)
    return np.fft.fft2(1.0 / np.abs(values) ** 2) / grid ** 2


def _monomials(n: int, m: int) -> List[Tuple[int, int]]:
    return [(j, k) for j in range(n + 1) for k in range(m + 1)]


def gram_matrix(coeffs: np.ndarray, monomials: Sequence[Tuple[int, int]],
                shift: Tuple[int, int] = (0, 0)) -> np.ndarray:
    """H[a, b] = <z^(b + shift), z^a> = ŵ(a - b - shift)"""
    size = coeffs.shape[0]
    out = np.zeros((len(monomials), len(monomials)), dtype=complex)
    for r, a in enumerate(monomials):
        for c, b in enumerate(monomials):
            out[r, c] = coeffs[(a[0] - b[0] - shift[0]) % size, (a[1] - b[1] - shift[1]) % size]
    return out


def _converged_weight(p: BivPoly, grid: int, cfg) -> Tuple[np.ndarray, int, float]:
    n, m = p.bidegree
    monos = _monomials(n + 1, m + 1)
    coeffs = weight_fourier(p, grid)
    previous = gram_matrix(coeffs, monos)
    change = np.inf
    while grid < cfg.GRAM_MAX_GRID:
        grid *= 2
        coeffs = weight_fourier(p, grid)
        current = gram_matrix(coeffs, monos)
        change = float(np.max(np.abs(current - previous)))
        previous = current
        logger.debug(f"🔍 Сетка {grid}: изменение Грама {change:.2e}")
        if change < cfg.GRAM_TOL:
            break
    if change >= cfg.GRAM_TOL:
        logger.warning(f"⚠️ Квадратура Грама не сошлась: {change:.2e} на сетке {grid}")
    return coeffs, grid, change


def orthonormal_complement(coeffs: np.ndarray, space: Sequence[Tuple[int, int]],
                           removed: Sequence[Tuple[int, int]], shift: Tuple[int, int] = (0, 0),
                           bidegree: Tuple[int, int] = (0, 0)) -> VecPoly:
    """
    Ортонормированный базис span(space) ⊖ z^shift span(removed) в L²(1/|p|²).
    """
    gram = gram_matrix(coeffs, space)
    # cross[b, a] = <z^(b + shift), z^a>; условие ортогональности: conj(cross) x = 0
    size = coeffs.shape[0]
    cross = np.array([[coeffs[(a[0] - b[0] - shift[0]) % size, (a[1] - b[1] - shift[1]) % size]
                       for a in space] for b in removed], dtype=complex).reshape(len(removed), len(space))
    basis = null_space(np.conj(cross)) if len(removed) else np.eye(len(space), dtype=complex)
    inner = basis.conj().T @ gram @ basis
    vals, vecs = eigh(0.5 * (inner + inner.conj().T))
    coords = basis @ vecs / np.sqrt(vals)
    tensor = np.zeros((coords.shape[1], bidegree[0] + 1, bidegree[1] + 1), dtype=complex)
    for i, (j, k) in enumerate(space):
        tensor[:, j, k] = coords[i, :]
    return VecPoly(tensor).canonical()


def _compressions(coeffs: np.ndarray, n: int, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Матрицы T1 и T2* на G в базисе мономов"""
    monos = _monomials(n - 1, m - 1)
    gram = gram_matrix(coeffs, monos)
    h1 = gram_matrix(coeffs, monos, (1, 0))
    h2 = gram_matrix(coeffs, monos, (0, -1))
    return np.linalg.solve(gram, h1), np.linalg.solve(gram, h2)


def joint_eigenvalues(T1: np.ndarray, T2s: np.ndarray) -> List[Tuple[complex, complex]]:
    """Диагонали общей треугольной формы коммутирующих T1, T2*"""
    if T1.size == 0:
        return []
    _, Z = schur(T1 + MIX * T2s, output="complex")
    d1 = np.diag(Z.conj().T @ T1 @ Z)
    d2 = np.diag(Z.conj().T @ T2s @ Z)
    return [(complex(a), complex(b)) for a, b in zip(d1, d2)]


def _spectrum_error(found: List[Tuple[complex, complex]], expected: List[Tuple[complex, complex]]) -> float:
    """Расстояние между мультимножествами при жадном сопоставлении"""
    if len(found) != len(expected):
        return np.inf
    left = list(expected)
    worst = 0.0
    for pt in found:
        dists = [max(abs(pt[0] - q[0]), abs(pt[1] - q[1])) for q in left]
        i = int(np.argmin(dists))
        worst = max(worst, dists[i])
        left.pop(i)
    return worst


def gram_model(p: BivPoly, grid: Optional[int] = None, cfg=None) -> GramModel:
    """
    Численная модель L²(1/|p|²) и сверка с пересечениями и системой Аглера.
    """
    cfg = cfg or default_config
    require_stable(p, cfg)
    n, m = p.bidegree
    pf = p.to_float()

    # 1. Коэффициенты Фурье веса
    coeffs, used_grid, change = _converged_weight(pf, grid or cfg.GRAM_GRID, cfg)

    # 2. Ортонормированные базисы пространств
    bases: Dict[str, VecPoly] = {}
    bases["E1"] = orthonormal_complement(coeffs, _monomials(n - 1, m), _monomials(n - 1, m - 1),
                                         (0, 1), (n - 1, m)) if n else VecPoly.zero(0, 0, m)
    bases["F1"] = orthonormal_complement(coeffs, _monomials(n - 1, m), _monomials(n - 1, m - 1),
                                         (0, 0), (n - 1, m)) if n else VecPoly.zero(0, 0, m)
    bases["E2"] = orthonormal_complement(coeffs, _monomials(n, m - 1), _monomials(n - 1, m - 1),
                                         (1, 0), (n, m - 1)) if m else VecPoly.zero(0, n, 0)
    bases["F2"] = orthonormal_complement(coeffs, _monomials(n, m - 1), _monomials(n - 1, m - 1),
                                         (0, 0), (n, m - 1)) if m else VecPoly.zero(0, n, 0)

    # 3. Сжатые операторы на G
    if n and m:
        bases["G"] = orthonormal_complement(coeffs, _monomials(n - 1, m - 1), [], (0, 0), (n - 1, m - 1))
        T1, T2s = _compressions(coeffs, n, m)
        found = joint_eigenvalues(T1, T2s)
    else:
        bases["G"] = VecPoly.zero(0, 0, 0)
        found = []

    # 4. Сверка с общими нулями q, q̃ в D² и формулой размерности
    expected = []
    for zero in joint_spectrum_points(p, cfg):
        expected.extend([zero.complex_point()] * zero.multiplicity)
    torus = torus_multiplicity_total(p, cfg)
    dim_formula = n * m - torus // 2

    system = canonical_system(p, cfg, check=False)
    shape = (max(n, 1), m + 1)
    deviation = float(np.max(np.abs(pad_kernel(bases["E1"].kernel(), shape)
                                    - pad_kernel(system.E1.kernel(), shape)), initial=0.0))

    model = GramModel(
        grid=used_grid,
        gram_change=change,
        dim_G=bases["G"].dim,
        dim_formula=dim_formula,
        joint_eigenvalues=found,
        expected_points=expected,
        spectrum_error=_spectrum_error(found, expected),
        e1_kernel_deviation=deviation,
        bases=bases,
    )
    if not model.spectrum_match:
        logger.warning(f"⚠️ Совместный спектр не совпал с нулями: {model.spectrum_error:.2e}")
    logger.info(f"📊 Модель Грама: сетка {used_grid}, dim G = {model.dim_G}, "
                f"собственных значений {len(found)}")
    return model
