"""
Некасательный анализ в точках тора: порядки обращения в ноль, младшие
формы, пределы, ограниченность и лестница C^k-регулярности для p̃/p.

Точка u обрабатывается через повёрнутый многочлен p(u1 z1, u2 z2) в (1, 1),
поэтому младшие формы всегда рассматриваются на RHP^d.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import config as default_config
from ..core.bivpoly import BivPoly
from ..core.homog import HomogExpansion, HomogForm, SparsePoly, homog_divide, homog_expand
from ..core.scalars import (
    EXACT_ONE,
    EXACT_ZERO,
    Backend,
    GaussianRational,
    exact,
    exact_parts,
    to_complex,
)
from ..utils.errors import InputFormatError, PreconditionError, UnboundedError
from ..utils.numerics import fit_slope, make_rng

logger = logging.getLogger(__name__)

PolyLike = Union[BivPoly, SparsePoly]


@dataclass(frozen=True)
class ApproachRegion:
    """AR_c: все |ζ_j| и Re ζ_j сравнимы с множителем c"""
    aperture: float = 2.0
    dimension: int = 2

    def __post_init__(self):
        if self.aperture <= 1.0:
            raise InputFormatError("Апертура области подхода должна быть больше 1")

    def contains(self, zeta: Sequence[complex]) -> bool:
        zeta = np.asarray(zeta, dtype=complex)
        if np.any(zeta.real <= 0):
            return False
        values = np.concatenate([np.abs(zeta), zeta.real])
        return float(values.max() / values.min()) <= self.aperture

    def directions(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Случайные направления лучей внутри AR_c"""
        out = []
        while len(out) < count:
            re = rng.uniform(1.0, math.sqrt(self.aperture), size=self.dimension)
            im = rng.uniform(-0.5, 0.5, size=self.dimension) * re
            zeta = re + 1j * im
            if self.contains(zeta):
                out.append(zeta / np.max(np.abs(zeta)))
        return np.array(out)


@dataclass
class BoundaryAnalysis:
    point: Tuple[Any, ...]
    M: int
    bottom_form: HomogForm
    bottom_ok: bool
    nu: Optional[Any] = None
    regularity_k: Optional[int] = None
    taylor_terms: List[HomogForm] = field(default_factory=list)
    real_after_gauge: Optional[bool] = None
    intersection_multiplicity: Optional[int] = None

    @property
    def multiplicity_floor(self) -> Optional[int]:
        if self.regularity_k is None:
            return None
        return self.M * (self.M + self.regularity_k + 1)

    @property
    def floor_ok(self) -> Optional[bool]:
        if self.intersection_multiplicity is None or self.multiplicity_floor is None:
            return None
        return self.intersection_multiplicity >= self.multiplicity_floor

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": list(self.point),
            "M": self.M,
            "bottom_form": self.bottom_form.to_dict(),
            "bottom_ok": self.bottom_ok,
            "nu": self.nu,
            "regularity_k": "NONE" if self.regularity_k is None else self.regularity_k,
            "taylor_terms": [f.to_dict() for f in self.taylor_terms],
            "multiplicity_floor": self.multiplicity_floor,
            "intersection_multiplicity": self.intersection_multiplicity,
            "floor_ok": self.floor_ok,
            "real_after_gauge": self.real_after_gauge,
        }


# ===== ЛОКАЛЬНЫЕ РАЗЛОЖЕНИЯ =====

def _is_exact_point(point: Sequence[Any]) -> bool:
    return all(isinstance(u, GaussianRational) for u in point)


def _rotate_sparse(poly: SparsePoly, point: Sequence[Any]) -> SparsePoly:
    terms = {}
    for exps, c in poly.terms.items():
        value = c
        for u, e in zip(point, exps):
            for _ in range(e):
                value = value * u
        terms[exps] = value
    return SparsePoly(terms, poly.nvars, poly.backend)


def local_expansion(p: PolyLike, point: Sequence[Any], cfg=None) -> HomogExpansion:
    """Однородные формы p(u(1 - ζ)) по степеням ζ"""
    cfg = cfg or default_config
    poly = SparsePoly.from_bivpoly(p) if isinstance(p, BivPoly) else p
    if len(point) != poly.nvars:
        raise InputFormatError(f"Точка размерности {len(point)} для многочлена от {poly.nvars} переменных")
    if poly.backend is Backend.EXACT and _is_exact_point(point):
        ones = tuple(EXACT_ONE for _ in point)
        rotated = _rotate_sparse(poly, point)
    else:
        pt = [to_complex(u) for u in point]
        if any(abs(abs(u) - 1.0) > cfg.REGION_TOL for u in pt):
            raise PreconditionError("Точка не лежит на торе", point=pt)
        pt = [u / abs(u) for u in pt]
        floated = SparsePoly({e: to_complex(c) for e, c in poly.terms.items()}, poly.nvars, Backend.FLOAT)
        ones = tuple(1 + 0j for _ in point)
        rotated = _rotate_sparse(floated, pt)
    expansion = homog_expand(rotated, ones, cfg)
    # Точка сохраняется исходной, а не (1, 1)
    return HomogExpansion(tuple(point), expansion.forms, expansion.order, expansion.backend)


def _align(p: PolyLike, q: PolyLike, point, cfg) -> Tuple[HomogExpansion, HomogExpansion]:
    """Разложения p и q в одной арифметике"""
    ep = local_expansion(p, point, cfg)
    eq = local_expansion(q, point, cfg)
    if ep.backend != eq.backend:
        if ep.backend is Backend.EXACT:
            ep = local_expansion(_to_float(p), point, cfg)
        else:
            eq = local_expansion(_to_float(q), point, cfg)
    return ep, eq


def _to_float(p: PolyLike) -> PolyLike:
    if isinstance(p, BivPoly):
        return p.to_float()
    return SparsePoly({e: to_complex(c) for e, c in p.terms.items()}, p.nvars, Backend.FLOAT)


def _finite_order(expansion: HomogExpansion) -> int:
    if math.isinf(expansion.order):
        raise PreconditionError("Нулевой многочлен не имеет конечного порядка")
    return int(expansion.order)


def vanishing_order(p: PolyLike, point: Sequence[Any], cfg=None) -> int:
    return _finite_order(local_expansion(p, point, cfg))


# ===== МЛАДШАЯ ФОРМА =====

def _rhp_root_test(form: HomogForm, tol: float) -> bool:
    """
    Форма от двух переменных без нулей на RHP² тогда и только тогда, когда
    все корни t = ζ/η лежат на замкнутой отрицательной полуоси.
    """
    coeffs = np.array([to_complex(c) for c in form.coeff_list()])  # при ζ^(deg-t) η^t
    scale = np.max(np.abs(coeffs), initial=0.0)
    nz = np.nonzero(np.abs(coeffs) > tol * scale)[0]
    if nz.size == 0:
        return False
    # многочлен от t = ζ/η по убыванию степеней после сокращения степеней ζ и η
    core = coeffs[nz[0]:nz[-1] + 1]
    if core.size <= 1:
        return True
    roots = np.roots(core)
    return bool(np.all((np.abs(roots.imag) <= 1e-6 * np.maximum(np.abs(roots), 1.0)) & (roots.real <= 1e-9)))


def bottom_form_check(p: PolyLike, point: Sequence[Any], samples: Optional[int] = None,
                      seed: Optional[int] = None, cfg=None) -> Tuple[HomogForm, bool]:
    """
    P_M и проверка отсутствия нулей на RHP^d.

    Для d = 2 решает расположение корней отношения ζ/η, для d > 2 -
    выборка случайных точек RHP^d с нормировкой по масштабу.
    """
    cfg = cfg or default_config
    expansion = local_expansion(p, point, cfg)
    form = expansion.bottom
    if form.nvars == 2:
        ok = _rhp_root_test(form, cfg.HOMOG_DIVIDE_TOL)
    else:
        rng = make_rng(cfg.SEED if seed is None else seed)
        count = samples or cfg.BOTTOM_SAMPLES
        radius = rng.uniform(0.05, 1.0, size=(count, form.nvars))
        angle = rng.uniform(-np.pi / 2, np.pi / 2, size=(count, form.nvars))
        pts = radius * np.exp(1j * angle)
        values = np.array([abs(to_complex(form.eval(list(z)))) for z in pts])
        norms = np.max(np.abs(pts), axis=1) ** form.degree * max(form.norm(), 1e-300)
        ok = bool(np.min(values / norms) > cfg.HOMOG_DIVIDE_TOL)
    if not ok:
        logger.info(f"⚠️ Младшая форма {form} имеет нули на RHP^{form.nvars}")
    return form, ok


def phase_normalize(form: HomogForm) -> Tuple[Any, HomogForm]:
    """Унимодулярный множитель, делающий первый ненулевой коэффициент положительным"""
    nonzero = sorted(e for e, c in form.terms.items() if abs(to_complex(c)) > 0)
    if not nonzero:
        return (EXACT_ONE if form.backend is Backend.EXACT else 1 + 0j), form
    c = form.terms[nonzero[0]]
    if isinstance(c, GaussianRational):
        re, im = exact_parts(c)
        if im == 0:
            gauge = EXACT_ONE if re > 0 else exact(-1)
            return gauge, form.scale(gauge)
    value = to_complex(c)
    gauge = abs(value) / value
    return gauge, _float_form(form).scale(gauge)


def _float_form(form: HomogForm) -> HomogForm:
    return HomogForm({e: to_complex(c) for e, c in form.terms.items()}, form.degree, form.nvars, Backend.FLOAT)


def _has_real_coefficients(form: HomogForm, tol: float) -> bool:
    scale = max(form.norm(), 1e-300)
    return all(abs(to_complex(c).imag) <= tol * scale for c in form.terms.values())


# ===== ОГРАНИЧЕННОСТЬ И ПРЕДЕЛЫ =====

def nontangential_bounded(q: PolyLike, p: PolyLike, point: Sequence[Any], cfg=None) -> bool:
    """q/p ограничена некасательно в точке, если q обращается в ноль не слабее p"""
    ep, eq = _align(p, q, point, cfg or default_config)
    M = _finite_order(ep)
    return math.isinf(eq.order) or eq.order >= M


def nontangential_limit(q: PolyLike, p: PolyLike, point: Sequence[Any], cfg=None) -> Optional[Any]:
    """
    Некасательный предел q/p: b с Q_M = b P_M, если такое b есть.

    None для ограниченной функции без предела; UnboundedError при дефиците порядка.
    """
    cfg = cfg or default_config
    ep, eq = _align(p, q, point, cfg)
    M = _finite_order(ep)
    if not (math.isinf(eq.order) or eq.order >= M):
        raise UnboundedError("q/p не ограничена некасательно: порядок q меньше порядка p",
                             order_q=eq.order, order_p=M)
    quotient = homog_divide(eq.form(M), ep.bottom)
    if quotient is None or quotient.degree != 0:
        return None
    zero = EXACT_ZERO if quotient.backend is Backend.EXACT else 0j
    return quotient.terms.get((0,) * quotient.nvars, zero)


# ===== ЛЕСТНИЦА РЕГУЛЯРНОСТИ =====

def _numerator_forms(ep: HomogExpansion, eq: HomogExpansion, nu: Any,
                     terms: Sequence[HomogForm], top: int) -> List[HomogForm]:
    """Формы Q - (ν + Σ F_j) P по степеням 0..top"""
    out = []
    for j in range(top + 1):
        acc = eq.form(j) - ep.form(j).scale(nu)
        for i, F in enumerate(terms, start=1):
            if j - i >= 0:
                acc = acc - F * ep.form(j - i)
        out.append(acc)
    return out


def regularity_ladder(p: BivPoly, point: Sequence[Any], k_max: Optional[int] = None,
                      cross_check: bool = True, cfg=None) -> BoundaryAnalysis:
    """
    C^k-лестница для f = p̃/p: ν = Q_M/P_M, затем
    F_k = (Q_{M+k} - ν P_{M+k} - Σ_{j<k} F_j P_{M+k-j}) / P_M до первого неделения.
    """
    cfg = cfg or default_config
    if not isinstance(p, BivPoly):
        raise PreconditionError("Лестница регулярности реализована для двух переменных")
    n, m = p.bidegree
    k_max = 2 * n * m if k_max is None else k_max
    if k_max < 0:
        raise InputFormatError("k_max должно быть неотрицательным")

    ep, eq = _align(p, p.reflect(), point, cfg)
    M = _finite_order(ep)
    P_M = ep.bottom
    _, bottom_ok = bottom_form_check(p, point, cfg=cfg)
    analysis = BoundaryAnalysis(point=tuple(point), M=M, bottom_form=P_M, bottom_ok=bottom_ok)

    # 1. ν
    quotient = homog_divide(eq.form(M), P_M)
    if quotient is None or quotient.degree != 0:
        logger.info(f"⚠️ В точке {point} нет некасательного предела")
        return analysis
    zero = EXACT_ZERO if quotient.backend is Backend.EXACT else 0j
    nu = quotient.terms.get((0, 0), zero)
    analysis.nu = nu
    analysis.regularity_k = 0
    _, gauged = phase_normalize(P_M.scale(nu))
    analysis.real_after_gauge = _has_real_coefficients(gauged, 1e-9)

    # 2. Слагаемые Тейлора
    terms: List[HomogForm] = []
    for k in range(1, k_max + 1):
        residual = eq.form(M + k) - ep.form(M + k).scale(nu)
        for j, F in enumerate(terms, start=1):
            residual = residual - F * ep.form(M + k - j)
        F_k = homog_divide(residual, P_M)
        if F_k is None:
            logger.debug(f"🔍 F_{k} не делится на P_M")
            break
        terms.append(HomogForm(F_k.terms, k, 2, F_k.backend))
        analysis.regularity_k = k
    analysis.taylor_terms = terms

    # 3. Сверка с кратностью пересечения
    if cross_check:
        from .intersect import multiplicity
        analysis.intersection_multiplicity = multiplicity(p, p.reflect(), point, cfg)
        if analysis.floor_ok is False:
            logger.warning(f"⚠️ N = {analysis.intersection_multiplicity} меньше "
                           f"M(M+k+1) = {analysis.multiplicity_floor}")
    logger.info(f"✅ Точка {point}: M = {M}, k = {analysis.regularity_k}")
    return analysis


def remainder_exponent(p: BivPoly, point: Sequence[Any], analysis: Optional[BoundaryAnalysis] = None,
                       rays: Optional[int] = None, exponents: Optional[Sequence[int]] = None,
                       aperture: float = 2.0, seed: Optional[int] = None, cfg=None) -> float:
    """
    Наименьший по лучам AR_c показатель убывания |f(u(1-ζ)) - (ν + Σ F_j(ζ))|.

    Числитель остатка собирается по формам, поэтому младшие степени
    сокращаются до вычисления.
    """
    cfg = cfg or default_config
    analysis = analysis or regularity_ladder(p, point, cross_check=False, cfg=cfg)
    if analysis.nu is None:
        raise PreconditionError("Остаток определён только при существующем пределе")
    rays = rays or cfg.RAY_COUNT
    exponents = exponents or cfg.RAY_EXPONENTS
    ep, eq = _align(p, p.reflect(), point, cfg)
    top = max(len(ep.forms), len(eq.forms)) + len(analysis.taylor_terms)
    numer = _numerator_forms(ep, eq, analysis.nu, analysis.taylor_terms, top)
    cutoff = analysis.M + len(analysis.taylor_terms)
    tail = [_float_form(f) for f in numer[cutoff + 1:] if not f.is_zero()]
    if not tail:
        return math.inf
    denom = [_float_form(f) for f in ep.forms]

    region = ApproachRegion(aperture, 2)
    directions = region.directions(rays, make_rng(cfg.SEED if seed is None else seed))
    radii = np.array([2.0 ** -e for e in exponents])
    slopes = []
    for d in directions:
        remainders = []
        for r in radii:
            zeta = list(r * d)
            num = sum((to_complex(f.eval(zeta)) for f in tail), 0j)
            den = sum((to_complex(f.eval(zeta)) for f in denom), 0j)
            remainders.append(abs(num / den))
        remainders = np.maximum(np.array(remainders), 1e-300)
        slopes.append(fit_slope(np.log(radii), np.log(remainders)))
    exponent = float(min(slopes))
    logger.debug(f"🔍 Показатель остатка в {point}: {exponent:.3f}")
    return exponent
