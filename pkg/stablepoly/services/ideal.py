"""
Идеал I_p многочленов q с q/p ∈ L²(T²).

Образующие - компоненты E1, F1, F2 канонической системы Аглера.
Принадлежность проверяется либо редукцией по базису Грёбнера, либо
оценкой |q|² <= c·W на сгущающихся сетках тора, где
W = (n+m)|p|² - 2Re(p̄(z1∂1p + z2∂2p)) = |E1|² + |E2|² на T².
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve

from ..config import config as default_config
from ..core.algebra import from_ring, groebner_basis, normal_form, rationalize, standard_monomials
from ..core.bivpoly import BivPoly
from ..core.codec import format_poly
from ..core.matpoly import unit_circle
from ..core.scalars import Backend, snap_rational
from ..utils.errors import NumericalFailure, PreconditionError
from ..utils.numerics import cluster_roots, fit_slope, relative_change, trimmed_roots
from .agler import AglerSystem, canonical_system
from .boundary import vanishing_order
from .intersect import Region, reflection_pair, torus_multiplicity_total
from .stability import require_semistable

logger = logging.getLogger(__name__)

TORUS_ROOT_TOL = 1e-6


class MembershipMode(str, Enum):
    EXACT = "exact"
    NUMERIC = "numeric"


@dataclass
class IdealDescription:
    generators: List[BivPoly]
    n: int
    m: int
    torus_count: int
    linfty_g: BivPoly
    linfty_h: BivPoly
    exact_generators: Optional[List[BivPoly]] = None

    def dim_formula(self, j: int, k: int) -> int:
        return (j + 1) * (k + 1) - self.torus_count // 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bidegree": [self.n, self.m],
            "torus_count": self.torus_count,
            "generators": [format_poly(g) for g in self.generators],
            "exact_generators": None if self.exact_generators is None
            else [format_poly(g) for g in self.exact_generators],
            "linfty_g": format_poly(self.linfty_g),
            "linfty_h": format_poly(self.linfty_h),
        }


@dataclass
class LocalCondition:
    point: Tuple[Any, Any]
    multiplicity: int
    p_order: int
    q_order: float

    @property
    def ok(self) -> bool:
        return self.q_order >= self.p_order

    def to_dict(self) -> Dict[str, Any]:
        from ..core.codec import format_scalar
        return {
            "point": [format_scalar(c) for c in self.point],
            "multiplicity": self.multiplicity,
            "p_order": self.p_order,
            "q_order": "inf" if self.q_order == float("inf") else int(self.q_order),
            "ok": self.ok,
        }


@dataclass
class MembershipResult:
    member: bool
    mode: MembershipMode
    fallback: bool = False
    remainder: Optional[str] = None
    grid_constants: List[Tuple[int, float]] = field(default_factory=list)
    growth: Optional[float] = None
    local: List[LocalCondition] = field(default_factory=list)

    @property
    def local_ok(self) -> bool:
        return all(c.ok for c in self.local)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "member": self.member,
            "mode": self.mode.value,
            "fallback": self.fallback,
            "remainder": self.remainder,
            "grid_constants": [[g, c] for g, c in self.grid_constants],
            "growth": self.growth,
            "local_ok": self.local_ok,
            "local": [c.to_dict() for c in self.local],
        }


@dataclass
class MultiplierCheck:
    grids: Tuple[int, int]
    sups: List[Tuple[float, float]]
    tol: float

    @property
    def stable(self) -> bool:
        return all(np.isfinite(a) and relative_change(a, b) <= self.tol for a, b in self.sups)

    def to_dict(self) -> Dict[str, Any]:
        return {"grids": list(self.grids), "sups": [list(s) for s in self.sups], "stable": self.stable}


# ===== ОБРАЗУЮЩИЕ =====

def _coefficient_rows(polys: Sequence[BivPoly], n: int, m: int) -> np.ndarray:
    rows = np.zeros((len(polys), (n + 1) * (m + 1)), dtype=complex)
    for i, g in enumerate(polys):
        grid = np.zeros((n + 1, m + 1), dtype=complex)
        c = g.float_coeffs
        grid[:c.shape[0], :c.shape[1]] = c
        rows[i] = grid.ravel()
    return rows


def _snap_span(polys: Sequence[BivPoly], n: int, m: int, cfg) -> Optional[List[BivPoly]]:
    """
    Приведённый ступенчатый базис линейной оболочки образующих
    с гауссово-рациональными коэффициентами, если он таков.
    """
    rows = _coefficient_rows(polys, n, m)
    if rows.size == 0:
        return []
    _, s, vh = np.linalg.svd(rows)
    rank = int(np.sum(s > cfg.G_RANK_TOL * max(s[0], 1.0))) if s.size else 0
    if rank == 0:
        return []
    space = vh[:rank]
    # 1. Ведущие столбцы выбираются жадно по росту ранга
    pivots: List[int] = []
    for col in range(space.shape[1]):
        trial = pivots + [col]
        if np.linalg.matrix_rank(space[:, trial], tol=cfg.G_RANK_TOL) == len(trial):
            pivots = trial
        if len(pivots) == rank:
            break
    reduced = solve(space[:, pivots], space)
    # 2. Округление до рациональных с малым знаменателем
    out = []
    for row in reduced:
        terms = {}
        for idx, value in enumerate(row):
            if abs(value) <= cfg.ZERO_RESIDUAL_TOL:
                continue
            snapped = snap_rational(value, cfg.SNAP_DENOMINATOR, cfg.ZERO_RESIDUAL_TOL)
            if snapped is None:
                logger.debug(f"🔍 Коэффициент {value:.6g} не округляется до рационального")
                return None
            terms[divmod(idx, m + 1)] = snapped
        out.append(BivPoly.from_terms(terms, (n, m), Backend.EXACT))
    return out


def _exact_ideal_ok(p: BivPoly, gens: List[BivPoly], torus: int) -> bool:
    """Округлённый идеал содержит p и имеет коразмерность N_T²/2"""
    basis = groebner_basis(gens)
    if p.is_exact and normal_form(p, basis):
        return False
    monos = standard_monomials(basis)
    return monos is not None and len(monos) == torus // 2


def generators(p: BivPoly, system: Optional[AglerSystem] = None, cfg=None) -> IdealDescription:
    """Образующие I_p, N_T² и мультипликаторы для I_p^∞"""
    cfg = cfg or default_config
    system = system or canonical_system(p, cfg)
    n, m = p.bidegree

    # 1. Компоненты E1, F1, F2
    gens = [g for vec in (system.E1, system.F1, system.F2) for g in vec.entries
            if not g.is_zero(cfg.ZERO_RESIDUAL_TOL)]
    torus = torus_multiplicity_total(p, cfg)
    if torus % 2:
        raise NumericalFailure("Нечётное N_T²", torus_count=torus)

    # 2. Точный вариант, если оболочка рациональна; без нулей на торе I_p = C[z1, z2]
    exact_gens = [BivPoly.constant(1)] if torus == 0 else _snap_span(gens, n, m, cfg)
    if exact_gens is not None and not _exact_ideal_ok(p, exact_gens, torus):
        logger.warning("⚠️ Округлённые образующие не задают I_p, точный режим недоступен")
        exact_gens = None

    g, h = linfty_multiplier(p, system, cfg)
    logger.info(f"✅ Образующих {len(gens)}, N_T² = {torus}, "
                f"точные: {'да' if exact_gens is not None else 'нет'}")
    return IdealDescription(
        generators=gens,
        n=n,
        m=m,
        torus_count=torus,
        linfty_g=g,
        linfty_h=h,
        exact_generators=exact_gens,
    )


def dim_P(p: BivPoly, j: int, k: int, cfg=None) -> int:
    """dim P_{j,k} = (j+1)(k+1) - N_T²/2 при j >= n-1, k >= m-1"""
    cfg = cfg or default_config
    n, m = p.bidegree
    if j < n - 1 or k < m - 1:
        raise PreconditionError("Формула размерности доказана только при j >= n-1, k >= m-1",
                                j=j, k=k, bidegree=[n, m])
    require_semistable(p, cfg)
    torus = torus_multiplicity_total(p, cfg)
    if torus % 2:
        raise NumericalFailure("Нечётное N_T²", torus_count=torus)
    return (j + 1) * (k + 1) - torus // 2


def codimension(p: BivPoly, description: Optional[IdealDescription] = None, cfg=None) -> int:
    """Число стандартных мономов базиса Грёбнера образующих"""
    description = description or generators(p, cfg=cfg)
    if description.exact_generators is None:
        raise PreconditionError("Коразмерность считается только по точным образующим")
    monos = standard_monomials(groebner_basis(description.exact_generators))
    if monos is None:
        raise NumericalFailure("Идеал образующих не нульмерен")
    return len(monos)


def interreduce(polys: Sequence[BivPoly], cfg=None) -> Tuple[List[BivPoly], bool]:
    """
    Редуцированный базис Грёбнера над Q(i).

    FLOAT-образующие сначала рационализуются, результат помечается приближённым.
    """
    cfg = cfg or default_config
    approximate = any(not g.is_exact for g in polys)
    exact_polys = [rationalize(g, cfg.RATIONAL_DENOMINATOR, cfg.RATIONAL_TOL) for g in polys]
    basis = groebner_basis(exact_polys)
    return [from_ring(f) for f in basis], approximate


# ===== ПРИНАДЛЕЖНОСТЬ =====

def local_conditions(p: BivPoly, q: BivPoly, cfg=None) -> List[LocalCondition]:
    """Порядок q против порядка p в каждом нуле p на торе"""
    cfg = cfg or default_config
    loose = cfg.with_overrides({"ORDER_TOL": cfg.ZERO_RESIDUAL_TOL})
    out = []
    for zero in reflection_pair(p, cfg).in_region(Region.TORUS):
        exact_route = zero.exact and p.is_exact and q.is_exact
        point = zero.point if exact_route else zero.complex_point()
        local_cfg = cfg if exact_route else loose
        pp = p if exact_route else p.to_float()
        qq = q if exact_route else q.to_float()
        p_order = vanishing_order(pp, point, local_cfg)
        q_order = float("inf") if qq.is_zero(cfg.ZERO_RESIDUAL_TOL) else vanishing_order(qq, point, local_cfg)
        out.append(LocalCondition(tuple(zero.point), zero.multiplicity, p_order, q_order))
    return out


def _weight_on_grid(p: BivPoly, zs: np.ndarray) -> np.ndarray:
    n, m = p.bidegree
    pv = p.eval_grid(zs, zs)
    dv = p.z_derivative(0).eval_grid(zs, zs) + p.z_derivative(1).eval_grid(zs, zs)
    return (n + m) * np.abs(pv) ** 2 - 2 * np.real(np.conj(pv) * dv)


def _grid_constants(p: BivPoly, q: BivPoly, cfg) -> List[Tuple[int, float]]:
    pf, qf = p.to_float(), q.to_float()
    out = []
    size = cfg.MEMBERSHIP_BASE_GRID
    for _ in range(cfg.MEMBERSHIP_DOUBLINGS + 1):
        zs = unit_circle(size, 0.5)
        weight = np.maximum(_weight_on_grid(pf, zs), np.finfo(float).tiny)
        ratio = np.abs(qf.eval_grid(zs, zs)) ** 2 / weight
        out.append((size, float(np.max(ratio))))
        logger.debug(f"🔍 Сетка {size}: c = {out[-1][1]:.4g}")
        size *= 2
    return out


def _doubling_growth(constants: List[Tuple[int, float]]) -> float:
    """Рост c за одно удвоение сетки по наклону log c на всех сетках"""
    values = [c for _, c in constants]
    if len(values) < 2 or max(values) <= 0:
        return 0.0
    logs = [math.log(max(c, 1e-300)) for c in values]
    return math.exp(fit_slope(range(len(logs)), logs)) - 1.0


def membership(p: BivPoly, q: BivPoly, mode: MembershipMode = MembershipMode.EXACT,
               description: Optional[IdealDescription] = None, cfg=None) -> MembershipResult:
    """
    q ∈ I_p.

    EXACT: остаток по базису Грёбнера точных образующих; если их нет,
    выполняется NUMERIC. NUMERIC: ограниченность c на сетках, при этом
    недостаток локального порядка в нуле на торе даёт отрицательный ответ.
    """
    cfg = cfg or default_config
    mode = MembershipMode(mode)
    require_semistable(p, cfg)
    local = local_conditions(p, q, cfg)

    if mode is MembershipMode.EXACT:
        description = description or generators(p, cfg=cfg)
        if description.exact_generators is not None and q.is_exact:
            rem = normal_form(q, groebner_basis(description.exact_generators))
            result = MembershipResult(member=not rem, mode=mode, remainder=str(rem.as_expr()), local=local)
            if result.member and not result.local_ok:
                logger.warning("⚠️ Нулевой остаток при нарушенных локальных условиях")
            logger.info(f"{'✅' if result.member else '❌'} Принадлежность (EXACT): {result.member}")
            return result
        logger.warning("⚠️ Точные образующие недоступны, переходим к NUMERIC")

    # 1. Константы на сгущающихся сетках
    constants = _grid_constants(p, q, cfg)
    growth = _doubling_growth(constants)
    bounded = growth < cfg.MEMBERSHIP_GROWTH
    # 2. Локальные порядки важнее сетки
    member = bounded and all(c.ok for c in local)
    if bounded and not member:
        logger.info("⚠️ Сетка не видит расходимости, но локальный порядок недостаточен")
    logger.info(f"{'✅' if member else '❌'} Принадлежность (NUMERIC): {member}, рост {growth:.2%}")
    return MembershipResult(
        member=member,
        mode=MembershipMode.NUMERIC,
        fallback=mode is MembershipMode.EXACT,
        grid_constants=constants,
        growth=growth,
        local=local,
    )


# ===== МУЛЬТИПЛИКАТОРЫ L∞ =====

def _torus_factor(coeffs: np.ndarray, cfg) -> np.ndarray:
    """Множитель Π(1 - conj(α) z) по корням на окружности, коэффициенты по возрастанию"""
    out = np.array([1.0 + 0j])
    roots = trimmed_roots(coeffs, 1e-12)
    for center, k in cluster_roots(roots, cfg.ROOT_CLUSTER_TOL):
        if abs(abs(center) - 1.0) > TORUS_ROOT_TOL:
            continue
        alpha = center / abs(center)
        for _ in range(k):
            out = np.convolve(out, np.array([1.0, -np.conj(alpha)]))
    return out


def _univariate(coeffs: np.ndarray, axis: int, cfg) -> BivPoly:
    grid = coeffs[np.newaxis, :] if axis == 1 else coeffs[:, np.newaxis]
    snapped = [snap_rational(c, cfg.SNAP_DENOMINATOR, cfg.ZERO_RESIDUAL_TOL) for c in coeffs]
    if all(s is not None for s in snapped):
        exact_grid = np.array(snapped, dtype=object)
        exact_grid = exact_grid[np.newaxis, :] if axis == 1 else exact_grid[:, np.newaxis]
        return BivPoly(exact_grid, Backend.EXACT)
    return BivPoly(grid, Backend.FLOAT)


def linfty_multiplier(p: BivPoly, system: Optional[AglerSystem] = None, cfg=None) -> Tuple[BivPoly, BivPoly]:
    """
    g(z2) - T-множитель det E1(z2), h(z1) - T-множитель det E2(z1).

    g·h·I_p ⊆ I_p^∞.
    """
    cfg = cfg or default_config
    system = system or canonical_system(p, cfg)
    out = []
    for mat, axis in ((system.E1_matrix, 1), (system.E2_matrix, 0)):
        coeffs = mat.det_coeffs() if mat.rows else np.array([1.0 + 0j])
        out.append(_univariate(_torus_factor(coeffs, cfg), axis, cfg))
    return out[0], out[1]


def multiplier_sup(p: BivPoly, description: IdealDescription, grid: int = 1024, cfg=None) -> MultiplierCheck:
    """sup |g h e / p| по сетке и по удвоенной сетке для каждой образующей e"""
    cfg = cfg or default_config
    sups = []
    values = {}
    for size in (grid, 2 * grid):
        zs = unit_circle(size, 0.5)
        pv = p.to_float().eval_grid(zs, zs)
        gh = (description.linfty_g.to_float().eval_grid(zs, zs)
              * description.linfty_h.to_float().eval_grid(zs, zs))
        values[size] = [float(np.max(np.abs(gh * e.to_float().eval_grid(zs, zs) / pv)))
                        for e in description.generators]
    for a, b in zip(values[grid], values[2 * grid]):
        sups.append((a, b))
    check = MultiplierCheck((grid, 2 * grid), sups, cfg.MEMBERSHIP_GROWTH)
    if not check.stable:
        logger.warning("⚠️ sup |g h e / p| меняется при удвоении сетки")
    return check
