"""
Общие нули пары многочленов на C∞ x C∞ и кратности пересечения.

Каждый нуль ищется в одной из четырёх аффинных карт (z_i или 1/z_i),
где обе координаты по модулю не больше единицы. Кратности считаются
через матрицы умножения фактор-кольца и сверяются с теоремой Безу.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import QQ_I, Poly, Symbol
from sympy.polys.orderings import lex
from sympy.polys.rings import ring

from ..config import config as default_config
from ..core.algebra import QuotientRing, gcd, multiplicity_at, resultant_z2
from ..core.bivpoly import BivPoly
from ..core.scalars import (
    EXACT_ONE,
    EXACT_ZERO,
    GaussianRational,
    exact,
    require_same_backend,
    snap_rational,
    to_complex,
)
from ..utils.errors import NumericalFailure, PreconditionError
from ..utils.numerics import cluster_multiple, cluster_roots, trimmed_roots

logger = logging.getLogger(__name__)

INFINITY = math.inf
CHARTS: Tuple[Tuple[int, int], ...] = ((0, 0), (1, 0), (0, 1), (1, 1))

_X = Symbol("x")
LEX_RING, _LX, _LY = ring("x,y", QQ_I, lex)


class Region(str, Enum):
    DD = "D×D"
    D_DINV = "D×D⁻¹"
    TORUS = "T²"
    DINV_D = "D⁻¹×D"
    DINV_DINV = "D⁻¹×D⁻¹"
    OTHER = "other"


@dataclass
class LocatedZero:
    point: Tuple[Any, Any]
    multiplicity: int
    region: Region
    chart: Tuple[int, int]
    exact: bool = False

    def complex_point(self) -> Tuple[complex, complex]:
        return tuple(c if c == INFINITY else to_complex(c) for c in self.point)

    def to_dict(self):
        from ..core.codec import format_scalar
        return {
            "point": ["∞" if c == INFINITY else format_scalar(c) for c in self.point],
            "multiplicity": self.multiplicity,
            "region": self.region.value,
            "chart": list(self.chart),
            "exact": self.exact,
        }


@dataclass
class IntersectionReport:
    zeros: List[LocatedZero]
    total: int
    bidegrees: Tuple[Tuple[int, int], Tuple[int, int]]
    torus_total: int
    disk_total: int
    bezout: int = 0

    def in_region(self, region: Region) -> List[LocatedZero]:
        return [z for z in self.zeros if z.region is region]

    def at(self, point: Sequence[complex], tol: float = 1e-6) -> Optional[LocatedZero]:
        for z in self.zeros:
            if _same_point(z.point, tuple(point), tol):
                return z
        return None

    def to_dict(self):
        return {
            "zeros": [z.to_dict() for z in self.zeros],
            "total": self.total,
            "bezout": self.bezout,
            "bidegrees": [list(b) for b in self.bidegrees],
            "torus_total": self.torus_total,
            "disk_total": self.disk_total,
        }


# ===== КАРТЫ И КЛАССИФИКАЦИЯ =====

def chart_poly(p: BivPoly, chart: Tuple[int, int]) -> BivPoly:
    out = p.flip1() if chart[0] else p
    return out.flip2() if chart[1] else out


def _to_chart(coord: Any, flipped: int) -> Any:
    """Координата точки в карте: z или 1/z, бесконечность переходит в ноль"""
    if not flipped:
        return coord
    if coord == INFINITY:
        return EXACT_ZERO
    if isinstance(coord, GaussianRational):
        return EXACT_ZERO if coord == EXACT_ZERO else EXACT_ONE / coord
    return INFINITY if coord == 0 else 1 / complex(coord)


def _from_chart(coord: Any, flipped: int) -> Any:
    if not flipped:
        return coord
    if isinstance(coord, GaussianRational):
        return INFINITY if coord == EXACT_ZERO else EXACT_ONE / coord
    return INFINITY if abs(coord) == 0 else 1 / complex(coord)


def _same_point(a: Tuple[Any, Any], b: Tuple[Any, Any], tol: float) -> bool:
    for x, y in zip(a, b):
        x_inf, y_inf = x == INFINITY, y == INFINITY
        if x_inf or y_inf:
            if x_inf != y_inf:
                return False
            continue
        if abs(to_complex(x) - to_complex(y)) > tol:
            return False
    return True


def classify(point: Tuple[Any, Any], tol: float) -> Region:
    kinds = []
    for c in point:
        if c == INFINITY:
            kinds.append("out")
            continue
        r = abs(to_complex(c))
        if abs(r - 1.0) <= tol:
            kinds.append("T")
        elif r < 1.0:
            kinds.append("in")
        else:
            kinds.append("out")
    table = {
        ("in", "in"): Region.DD,
        ("in", "out"): Region.D_DINV,
        ("T", "T"): Region.TORUS,
        ("out", "in"): Region.DINV_D,
        ("out", "out"): Region.DINV_DINV,
    }
    return table.get(tuple(kinds), Region.OTHER)


# ===== РЕЗУЛЬТАНТ И ПОИСК КОРНЕЙ =====

def _trim_columns(grid: np.ndarray, tol: float) -> np.ndarray:
    keep = grid.shape[1]
    while keep > 1 and np.max(np.abs(grid[:, keep - 1])) <= tol:
        keep -= 1
    return grid[:, :keep]


def _sylvester_resultant(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """
    Коэффициенты Res_{z2}(f, g) по z1 (по возрастанию).

    Определитель матрицы Сильвестра вычисляется на окружности и
    восстанавливается по FFT.
    """
    m1, m2 = f.shape[1] - 1, g.shape[1] - 1
    n1, n2 = f.shape[0] - 1, g.shape[0] - 1
    top = n1 * m2 + n2 * m1
    if m1 == 0 and m2 == 0:
        return np.array([1 + 0j])
    count = 1 << max(int(np.ceil(np.log2(top + 1))), 2)
    us = np.exp(2j * np.pi * np.arange(count) / count)
    size = m1 + m2
    values = np.empty(count, dtype=complex)
    for idx, u in enumerate(us):
        a = np.power(u, np.arange(n1 + 1)) @ f
        b = np.power(u, np.arange(n2 + 1)) @ g
        syl = np.zeros((size, size), dtype=complex)
        for row in range(m2):
            syl[row, row:row + m1 + 1] = a[::-1]
        for row in range(m1):
            syl[m2 + row, row:row + m2 + 1] = b[::-1]
        values[idx] = np.linalg.det(syl) if size else 1.0
    coeffs = np.fft.fft(values) / count
    return coeffs[:top + 1]


def _u_candidates(f: BivPoly, g: BivPoly, cfg) -> List[complex]:
    if f.is_exact:
        res = resultant_z2(f, g)
        if all(c == EXACT_ZERO for c in res):
            raise PreconditionError("Результант тождественно равен нулю: общий множитель")
        poly = Poly(list(reversed(res)), _X, domain=QQ_I)
        roots: List[complex] = []
        for factor, _ in poly.sqf_list()[1]:
            coeffs = [to_complex(QQ_I.convert(c)) for c in reversed(factor.rep.to_list())]
            roots.extend(trimmed_roots(coeffs))
        return [r for r, _ in cluster_roots(roots, 1e-9)]
    a = _trim_columns(f.float_coeffs / f.norm(), 1e-14)
    b = _trim_columns(g.float_coeffs / g.norm(), 1e-14)
    res = _sylvester_resultant(a, b)
    if np.max(np.abs(res), initial=0.0) <= 1e-12:
        raise PreconditionError("Результант численно равен нулю: общий множитель")
    roots = trimmed_roots(res, 1e-13)
    return [r for r, _ in cluster_multiple(roots, cfg.ROOT_CLUSTER_TOL, cfg.EIGEN_CLUSTER_TOL, cfg.ROOT_NOISE)]


def _relative_residual(p: BivPoly, u: complex, v: complex) -> float:
    """|p(u, v)| относительно оценки sum|c| max(1, |u|)^n max(1, |v|)^m"""
    c = p.float_coeffs
    n, m = p.bidegree
    value = abs(np.power(u, np.arange(n + 1)) @ c @ np.power(v, np.arange(m + 1)))
    size = float(np.sum(np.abs(c))) * max(1.0, abs(u)) ** n * max(1.0, abs(v)) ** m
    return value / size if size > 0 else value


def _partners(f: BivPoly, g: BivPoly, u: complex, cfg) -> List[complex]:
    cf = np.power(u, np.arange(f.bidegree[0] + 1)) @ f.float_coeffs
    cg = np.power(u, np.arange(g.bidegree[0] + 1)) @ g.float_coeffs
    tol_f = 1e-10 * max(f.norm(), 1e-300) * max(1.0, abs(u)) ** f.bidegree[0]
    tol_g = 1e-10 * max(g.norm(), 1e-300) * max(1.0, abs(u)) ** g.bidegree[0]
    f_zero = np.max(np.abs(cf)) <= tol_f
    g_zero = np.max(np.abs(cg)) <= tol_g
    if f_zero and g_zero:
        raise PreconditionError("Оба многочлена обращаются в ноль на прямой z1 = u: общий множитель",
                                u=u)
    candidates = []
    for coeffs, zero in ((cf, f_zero), (cg, g_zero)):
        if not zero:
            candidates.extend(trimmed_roots(coeffs, 1e-13))

    def common(v: complex) -> bool:
        return (_relative_residual(f, u, v) <= cfg.ZERO_RESIDUAL_TOL
                and _relative_residual(g, u, v) <= cfg.ZERO_RESIDUAL_TOL)

    found = []
    for v, k in cluster_multiple(candidates, cfg.ROOT_CLUSTER_TOL, cfg.EIGEN_CLUSTER_TOL, cfg.ROOT_NOISE):
        if common(v):
            found.append(v)
        elif k > 1:
            # центр кластера не нуль: проверяем его члены по отдельности
            members = [c for c in candidates if abs(c - v) <= cfg.ROOT_CLUSTER_TOL * k]
            found.extend(w for w, _ in cluster_roots(members, cfg.EIGEN_CLUSTER_TOL) if common(w))
    return found


def _snap_point(f: BivPoly, g: BivPoly, point: Tuple[complex, complex], cfg) -> Optional[Tuple[Any, Any]]:
    """Точная гауссово-рациональная точка рядом с найденной, если она - общий нуль"""
    snapped = [snap_rational(c, cfg.SNAP_DENOMINATOR, 1e-4) for c in point]
    if any(s is None for s in snapped):
        return None
    if f.is_exact:
        if f.eval_exact(*snapped) == EXACT_ZERO and g.eval_exact(*snapped) == EXACT_ZERO:
            return tuple(snapped)
        return None
    u, v = to_complex(snapped[0]), to_complex(snapped[1])
    if _relative_residual(f, u, v) <= 1e-10 and _relative_residual(g, u, v) <= 1e-10:
        return tuple(snapped)
    return None


def _check_inputs(p1: BivPoly, p2: BivPoly) -> None:
    require_same_backend(p1.backend, p2.backend)
    if p1.is_zero() or p2.is_zero():
        raise PreconditionError("Нулевой многочлен в паре")
    nat1, nat2 = p1.natural_bidegree, p2.natural_bidegree
    for axis in (0, 1):
        if nat1[axis] < p1.bidegree[axis] and nat2[axis] < p2.bidegree[axis]:
            raise PreconditionError(f"Общая компонента на бесконечности по z{axis + 1}")
    if p1.is_exact:
        common = gcd(p1, p2)
        if common.natural_bidegree != (0, 0):
            raise PreconditionError("Многочлены имеют общий множитель", factor=str(common))


def _dedup_tol(mult: int, cfg) -> float:
    """Радиус совпадения с уже найденным нулём кратности mult"""
    return min(cfg.ROOT_CLUSTER_TOL, max(cfg.DEDUP_TOL, 10.0 * cfg.ROOT_NOISE ** (1.0 / max(mult, 2))))


# ===== ОПЕРАЦИИ =====

def common_zeros(p1: BivPoly, p2: BivPoly, cfg=None) -> IntersectionReport:
    """Все общие нули пары на C∞ x C∞ с кратностями"""
    cfg = cfg or default_config
    _check_inputs(p1, p2)
    (n1, m1), (n2, m2) = p1.bidegree, p2.bidegree
    bezout = n1 * m2 + n2 * m1
    slack = cfg.ROOT_CLUSTER_TOL
    zeros: List[LocatedZero] = []
    accepted: List[Tuple[Tuple[Any, Any], int]] = []

    for chart in CHARTS:
        f, g = chart_poly(p1, chart), chart_poly(p2, chart)
        quotient: Optional[QuotientRing] = None
        for u in _u_candidates(f, g, cfg):
            if abs(u) > 1 + slack:
                continue
            for v in _partners(f, g, u, cfg):
                if abs(v) > 1 + slack:
                    continue
                local = (u, v)
                original = (_from_chart(u, chart[0]), _from_chart(v, chart[1]))
                if any(_same_point(original, prev, _dedup_tol(k, cfg)) for prev, k in accepted):
                    continue
                snapped = _snap_point(f, g, local, cfg)
                if snapped is not None:
                    local = snapped
                    original = (_from_chart(snapped[0], chart[0]), _from_chart(snapped[1], chart[1]))
                if quotient is None:
                    quotient = QuotientRing([f, g], cfg)
                mult = multiplicity_at(quotient, local, p1.is_exact)
                if mult <= 0:
                    logger.debug(f"🔍 Кандидат {original} отброшен: кратность 0")
                    continue
                region_tol = cfg.REGION_TOL if snapped is not None else cfg.DEDUP_TOL
                zeros.append(LocatedZero(original, mult, classify(original, region_tol), chart,
                                         exact=snapped is not None and p1.is_exact))
                accepted.append((original, mult))

    total = sum(z.multiplicity for z in zeros)
    report = IntersectionReport(
        zeros=zeros,
        total=total,
        bidegrees=(p1.bidegree, p2.bidegree),
        torus_total=sum(z.multiplicity for z in zeros if z.region is Region.TORUS),
        disk_total=sum(z.multiplicity for z in zeros if z.region is Region.DD),
        bezout=bezout,
    )
    if total != bezout:
        logger.error(f"❌ Сумма кратностей {total} не совпадает с числом Безу {bezout}")
        raise NumericalFailure("Нарушена теорема Безу", total=total, bezout=bezout,
                               zeros=[z.to_dict() for z in zeros])
    logger.info(f"📊 Найдено {len(zeros)} общих нулей, сумма кратностей {total}")
    return report


def reflection_pair(p: BivPoly, cfg=None) -> IntersectionReport:
    """Нули пары (p, p̃) с проверкой чётности на торе и допустимых областей"""
    report = common_zeros(p, p.reflect(), cfg)
    for z in report.zeros:
        if z.region is Region.OTHER or z.region in (Region.DD, Region.DINV_DINV):
            raise NumericalFailure("Общий нуль p и p̃ вне (D×D⁻¹) ∪ T² ∪ (D⁻¹×D)",
                                   point=str(z.point), region=z.region.value)
        if z.region is Region.TORUS and z.multiplicity % 2:
            raise NumericalFailure("Нечётная кратность нуля на торе",
                                   point=str(z.point), multiplicity=z.multiplicity)
    return report


def _chart_for(point: Sequence[Any]) -> Tuple[int, int]:
    out = []
    for c in point:
        out.append(1 if c == INFINITY or abs(to_complex(c)) > 1 else 0)
    return tuple(out)


def multiplicity(p1: BivPoly, p2: BivPoly, point: Sequence[Any], cfg=None) -> int:
    """
    Кратность пересечения в точке (возможно с бесконечными координатами).

    В точке, не являющейся общим нулём, возвращает 0.
    """
    cfg = cfg or default_config
    require_same_backend(p1.backend, p2.backend)
    chart = _chart_for(point)
    local = (_to_chart(point[0], chart[0]), _to_chart(point[1], chart[1]))
    f, g = chart_poly(p1, chart), chart_poly(p2, chart)
    quotient = QuotientRing([f, g], cfg)
    return multiplicity_at(quotient, local, p1.is_exact)


def torus_multiplicity_total(p: BivPoly, cfg=None) -> int:
    """N_T²(p, p̃) двумя путями: прямой суммой и через нули (q, q̃) в D²"""
    cfg = cfg or default_config
    n, m = p.bidegree
    direct = reflection_pair(p, cfg).torus_total
    q = p.flip2()
    via_disk = 2 * n * m - 2 * common_zeros(q, q.reflect(), cfg).disk_total
    if direct != via_disk:
        logger.error(f"❌ Расхождение путей подсчёта N_T²: {direct} против {via_disk}")
        raise NumericalFailure("Два способа подсчёта нулей на торе расходятся",
                               direct=direct, via_disk=via_disk)
    logger.info(f"✅ N_T² = {direct}")
    return direct


def joint_spectrum_points(p: BivPoly, cfg=None) -> List[LocatedZero]:
    """Общие нули q = z2^m p(z1, 1/z2) и q̃ в открытом бидиске"""
    q = p.flip2()
    return common_zeros(q, q.reflect(), cfg).in_region(Region.DD)


# ===== АЛГОРИТМ ФУЛТОНА =====

def _x_part(f) -> Dict[int, Any]:
    return {e[0]: c for e, c in f.items() if e[1] == 0}


def fulton_reduce(p1: BivPoly, p2: BivPoly, point: Sequence[Any], cfg=None) -> int:
    """
    Кратность по правилам Фултона: сдвиг точки в начало координат,
    затем понижение степени G(x, 0) вычитанием кратных F.
    """
    cfg = cfg or default_config
    if not (p1.is_exact and p2.is_exact):
        raise PreconditionError("Алгоритм Фултона требует EXACT-бэкенда")
    if any(c == INFINITY for c in point):
        raise PreconditionError("Алгоритм Фултона работает в конечной точке")
    lam = [c if isinstance(c, GaussianRational) else exact(c) for c in point]
    shift = [(_LX, _LX + lam[0]), (_LY, _LY + lam[1])]
    F = LEX_RING.from_dict(p1.terms()).compose(shift)
    G = LEX_RING.from_dict(p2.terms()).compose(shift)

    total = 0
    for step in range(cfg.FULTON_BUDGET):
        if F.get((0, 0), EXACT_ZERO) != EXACT_ZERO or G.get((0, 0), EXACT_ZERO) != EXACT_ZERO:
            return total
        fx, gx = _x_part(F), _x_part(G)
        r = max(fx) if fx else None
        s = max(gx) if gx else None
        if r is None and s is None:
            raise PreconditionError("Общая компонента через точку: кратность бесконечна")
        if r is None or (s is not None and r > s):
            F, G, fx, gx, r, s = G, F, gx, fx, s, r
        if s is None:
            # G = y H: I(F, G) = ord_x F(x, 0) + I(F, H)
            total += min(fx)
            G = LEX_RING.from_dict({(a, b - 1): c for (a, b), c in G.items()})
            continue
        coef = gx[s] / fx[r]
        G = G - F.mul_term(((s - r, 0), coef))
    raise NumericalFailure("Алгоритм Фултона превысил бюджет шагов", budget=cfg.FULTON_BUDGET)
