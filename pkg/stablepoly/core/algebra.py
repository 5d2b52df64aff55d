"""
Точная алгебра над гауссовыми рациональными: НОД, результанты,
базисы Грёбнера и матрицы умножения в фактор-кольце.
"""
import logging
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import QQ_I, Poly
from sympy.polys.groebnertools import groebner
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, ring

from ..config import config as default_config
from ..utils.errors import PreconditionError
from ..utils.numerics import cluster_multiple
from .bivpoly import Z1, Z2, BivPoly
from .scalars import (
    EXACT_ONE,
    EXACT_ZERO,
    Backend,
    GaussianRational,
    exact,
    snap_rational,
    to_complex,
)

logger = logging.getLogger(__name__)

GRLEX_RING, _R1, _R2 = ring("z1,z2", QQ_I, grlex)


def _require_exact(*polys: BivPoly) -> None:
    for p in polys:
        if not p.is_exact:
            raise PreconditionError("Операция определена только для EXACT-бэкенда")


def to_ring(p: BivPoly, ring_=GRLEX_RING) -> PolyElement:
    return ring_.from_dict(p.to_exact().terms())


def from_ring(f: PolyElement, bidegree: Optional[Tuple[int, int]] = None) -> BivPoly:
    terms = {(int(e[0]), int(e[1])): c for e, c in f.items()}
    return BivPoly.from_terms(terms, bidegree, Backend.EXACT)


def _z2_main(p: BivPoly) -> Poly:
    """Poly от (z2, z1): z2 главная переменная"""
    return Poly.from_dict({(k, j): c for (j, k), c in p.terms().items()}, Z2, Z1, domain=QQ_I)


def gcd(p1: BivPoly, p2: BivPoly) -> BivPoly:
    """НОД над Q(i), нормированный по старшему (z2, z1)-лексикографически коэффициенту"""
    _require_exact(p1, p2)
    if p1.is_zero() and p2.is_zero():
        raise PreconditionError("НОД двух нулевых многочленов не определён")
    g = _z2_main(p1).gcd(_z2_main(p2))
    data = g.as_dict(native=True)
    lead = max(data)
    lc = data[lead]
    return BivPoly.from_terms({(j, k): c / lc for (k, j), c in data.items()}, None, Backend.EXACT)


def has_common_factor(p1: BivPoly, p2: BivPoly) -> bool:
    g = gcd(p1, p2)
    return g.natural_bidegree != (0, 0)


def resultant_z2(p1: BivPoly, p2: BivPoly) -> List[GaussianRational]:
    """Res_{z2}(p1, p2) как список коэффициентов по возрастанию степеней z1"""
    _require_exact(p1, p2)
    res = _z2_main(p1).resultant(_z2_main(p2))
    if not isinstance(res, Poly):
        return [QQ_I.convert(res)]
    data = res.as_dict(native=True)
    if not data:
        return [EXACT_ZERO]
    top = max(e[0] for e in data)
    return [data.get((t,), EXACT_ZERO) for t in range(top + 1)]


def rationalize(p: BivPoly, max_denominator: Optional[int] = None, tol: Optional[float] = None) -> BivPoly:
    """Приближение FLOAT-многочлена гауссовыми рациональными с ограниченным знаменателем"""
    if p.is_exact:
        return p
    max_denominator = max_denominator or default_config.RATIONAL_DENOMINATOR
    tol = default_config.RATIONAL_TOL if tol is None else tol
    terms = {}
    for key, c in p.terms().items():
        snapped = snap_rational(c, max_denominator, tol * max(1.0, p.norm()))
        if snapped is None:
            re = Fraction(c.real).limit_denominator(max_denominator)
            im = Fraction(c.imag).limit_denominator(max_denominator)
            snapped = exact(re, im)
        terms[key] = snapped
    return BivPoly.from_terms(terms, p.bidegree, Backend.EXACT)


# ===== БАЗИСЫ ГРЁБНЕРА =====

def groebner_basis(polys: Sequence[BivPoly]) -> List[PolyElement]:
    """Редуцированный базис Грёбнера в порядке grlex, z1 > z2"""
    elems = [to_ring(p) for p in polys if not p.is_zero()]
    if not elems:
        return []
    return groebner(elems, GRLEX_RING)


def normal_form(q: BivPoly, basis: List[PolyElement]) -> PolyElement:
    f = to_ring(q)
    if not basis:
        return f
    return f.rem(basis)


def standard_monomials(basis: List[PolyElement]) -> Optional[List[Tuple[int, int]]]:
    """Мономы, не делящиеся на старшие; None для не нульмерного идеала"""
    if not basis:
        return None
    leads = [g.LM for g in basis]
    if any(lm == (0, 0) for lm in leads):
        return []
    pure1 = [a for a, b in leads if b == 0]
    pure2 = [b for a, b in leads if a == 0]
    if not pure1 or not pure2:
        return None
    out = []
    for a in range(min(pure1)):
        for b in range(min(pure2)):
            if not any(a >= la and b >= lb for la, lb in leads):
                out.append((a, b))
    out.sort(key=lambda e: (e[0] + e[1], e[0]))
    return out


def _matrix_power(mat: List[List[Any]], power: int) -> List[List[Any]]:
    size = len(mat)
    result = [[EXACT_ONE if i == j else EXACT_ZERO for j in range(size)] for i in range(size)]
    for _ in range(power):
        result = [[sum((result[i][t] * mat[t][j] for t in range(size)), EXACT_ZERO)
                   for j in range(size)] for i in range(size)]
    return result


class QuotientRing:
    """
    Фактор-кольцо C[z1, z2]/<f1, ..., fr> для нульмерного идеала.

    Матрицы умножения M1, M2 действуют на координаты в базисе стандартных мономов.
    """

    def __init__(self, polys: Sequence[BivPoly], cfg=None):
        self.cfg = cfg or default_config
        exact_polys = [p.to_exact() for p in polys]
        self.basis = groebner_basis(exact_polys)
        monomials = standard_monomials(self.basis)
        if monomials is None:
            raise PreconditionError("Идеал не нульмерен: общие нули образуют кривую")
        self.monomials = monomials
        self.index = {mono: i for i, mono in enumerate(monomials)}
        logger.debug(f"🔍 Фактор-кольцо размерности {len(monomials)}, базис из {len(self.basis)} элементов")

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def coordinates(self, f: PolyElement) -> List[GaussianRational]:
        nf = f.rem(self.basis) if self.basis else f
        vec = [EXACT_ZERO] * self.dimension
        for mono, c in nf.items():
            vec[self.index[tuple(mono)]] = c
        return vec

    def _multiplication(self, shift: Tuple[int, int]) -> List[List[GaussianRational]]:
        size = self.dimension
        mat = [[EXACT_ZERO] * size for _ in range(size)]
        for col, (a, b) in enumerate(self.monomials):
            image = GRLEX_RING.from_dict({(a + shift[0], b + shift[1]): EXACT_ONE})
            for row, c in enumerate(self.coordinates(image)):
                mat[row][col] = c
        return mat

    @cached_property
    def M1(self) -> List[List[GaussianRational]]:
        return self._multiplication((1, 0))

    @cached_property
    def M2(self) -> List[List[GaussianRational]]:
        return self._multiplication((0, 1))

    def float_matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        m1 = np.array([[to_complex(c) for c in row] for row in self.M1], dtype=complex).reshape(self.dimension, self.dimension)
        m2 = np.array([[to_complex(c) for c in row] for row in self.M2], dtype=complex).reshape(self.dimension, self.dimension)
        return m1, m2

    def exact_multiplicity(self, point: Tuple[GaussianRational, GaussianRational]) -> int:
        """Размерность совместного корневого подпространства в рациональной точке"""
        size = self.dimension
        if size == 0:
            return 0
        blocks = []
        for mat, lam in ((self.M1, point[0]), (self.M2, point[1])):
            shifted = [[mat[i][j] - (lam if i == j else EXACT_ZERO) for j in range(size)] for i in range(size)]
            blocks.extend(_matrix_power(shifted, size))
        rank = DomainMatrix(blocks, (2 * size, size), QQ_I).rank()
        return size - rank

    def float_multiplicity(self, point: Tuple[complex, complex], radius: Optional[float] = None) -> int:
        """Размер кластера собственных значений M1 + c M2 у λ1 + c λ2

        Кластеры строятся с учётом кратности: k-кратное значение расходится
        на ~noise^(1/k), поэтому радиус совпадения зависит от размера кластера.
        """
        if self.dimension == 0:
            return 0
        coarse = self.cfg.FLOAT_CLUSTER_RADIUS if radius is None else radius
        m1, m2 = self.float_matrices()
        mix = 0.5773502691896258 + 0.3141592653589793j
        mat = m1 + mix * m2
        eig = np.linalg.eigvals(mat)
        target = complex(point[0]) + mix * complex(point[1])
        scale = max(1.0, abs(target))
        noise = self.cfg.EIGEN_NOISE * max(1.0, float(np.max(np.abs(mat))))
        clusters = cluster_multiple(eig, coarse * scale, self.cfg.EIGEN_CLUSTER_TOL * scale, noise)
        centre, k = min(clusters, key=lambda ck: abs(ck[0] - target))
        reach = min(coarse, max(self.cfg.EIGEN_CLUSTER_TOL, 10.0 * self.cfg.ROOT_NOISE ** (1.0 / max(k, 2))))
        return k if abs(centre - target) <= reach * scale else 0

    def joint_eigenvalues(self) -> List[Tuple[complex, complex]]:
        """Совместные собственные значения (M1, M2) через векторы M1 + c M2"""
        if self.dimension == 0:
            return []
        m1, m2 = self.float_matrices()
        mix = 0.5773502691896258 + 0.3141592653589793j
        _, vecs = np.linalg.eig(m1 + mix * m2)
        out = []
        for v in vecs.T:
            k = int(np.argmax(np.abs(v)))
            out.append((complex((m1 @ v)[k] / v[k]), complex((m2 @ v)[k] / v[k])))
        return out

    def reduces_to_zero(self, q: BivPoly) -> bool:
        return not normal_form(q, self.basis)


def multiplicity_at(quotient: QuotientRing, point: Sequence[Any], exact_input: bool = True) -> int:
    """Точный путь для гауссово-рациональной точки точного идеала, иначе кластеризация собственных значений"""
    if exact_input and all(isinstance(c, GaussianRational) for c in point):
        return quotient.exact_multiplicity((point[0], point[1]))
    return quotient.float_multiplicity((to_complex(point[0]), to_complex(point[1])))
