"""
Независимые проверки грубой силой: квадратура ∫|q/p|² по тору,
коэффициенты Фурье q/p и кратности пересечения через результанты.
"""
import csv
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import QQ_I, Poly

from ..config import config as default_config
from ..core.bivpoly import BivPoly, exact_point
from ..core.matpoly import unit_circle
from ..utils.errors import NumericalFailure, PreconditionError
from ..utils.numerics import fit_slope, make_rng, relative_change
from .stability import require_semistable

logger = logging.getLogger(__name__)

_U, _V = sympy.symbols("u v")

SINGULAR_FACTOR = 10.0


class Verdict(str, Enum):
    CONVERGENT = "CONVERGENT"
    DIVERGENT = "DIVERGENT"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class ConvergenceVerdict:
    estimates: List[Tuple[int, float]]
    verdict: Verdict
    growth_exponent: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "estimates": [[g, v] for g, v in self.estimates],
            "verdict": self.verdict.value,
            "growth_exponent": self.growth_exponent,
        }


@dataclass
class PartialSumTrend:
    boxes: List[int]
    sums: List[float]
    slope: float
    plateau: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"boxes": self.boxes, "sums": self.sums, "slope": self.slope, "plateau": self.plateau}


@dataclass
class FourierReport:
    box: Tuple[int, int]
    grid: int
    coefficients: np.ndarray = field(repr=False)
    trends: Dict[str, PartialSumTrend] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "box": list(self.box),
            "grid": self.grid,
            "max_abs": float(np.max(np.abs(self.coefficients), initial=0.0)),
            "trends": {k: v.to_dict() for k, v in self.trends.items()},
        }


# ===== КВАДРАТУРА L² =====

def _angles_to_points(a: np.ndarray, size: int) -> np.ndarray:
    return np.exp(2j * np.pi * a / size)


def _grid_estimate(q: BivPoly, p: BivPoly, size: int, refine: int) -> float:
    """Правило средних точек с измельчением ячеек у нулей p"""
    zs = unit_circle(size, 0.5)
    pv = p.eval_grid(zs, zs)
    values = np.abs(q.eval_grid(zs, zs)) ** 2 / np.maximum(np.abs(pv) ** 2, np.finfo(float).tiny)
    singular = np.argwhere(np.abs(pv) < SINGULAR_FACTOR / size)
    if singular.size:
        # Подсетка refine x refine внутри каждой особой ячейки
        offsets = (np.arange(refine) + 0.5) / refine
        sub1 = singular[:, 0][:, None, None] + offsets[None, :, None]
        sub2 = singular[:, 1][:, None, None] + offsets[None, None, :]
        sub1, sub2 = np.broadcast_arrays(sub1, sub2)
        z1 = _angles_to_points(sub1, size)
        z2 = _angles_to_points(sub2, size)
        local = np.abs(q.eval(z1, z2)) ** 2 / np.maximum(np.abs(p.eval(z1, z2)) ** 2, np.finfo(float).tiny)
        values[singular[:, 0], singular[:, 1]] = local.reshape(len(singular), -1).mean(axis=1)
        logger.debug(f"🔍 Сетка {size}: измельчено {len(singular)} ячеек")
    return float(values.mean())


def l2_quadrature(q: BivPoly, p: BivPoly, max_grid: Optional[int] = None, cfg=None) -> ConvergenceVerdict:
    """
    Оценки ∫|q/p|² dσ на сетках base·2^i и вердикт сходимости.

    CONVERGENT: относительное изменение меньше порога на двух последних
    удвоениях. DIVERGENT: положительный показатель роста по >= 3 удвоениям.
    """
    cfg = cfg or default_config
    require_semistable(p, cfg)
    max_grid = max_grid or cfg.L2_MAX_GRID
    qf, pf = q.to_float(), p.to_float()

    estimates: List[Tuple[int, float]] = []
    size = cfg.L2_BASE_GRID
    while size <= max_grid:
        estimates.append((size, _grid_estimate(qf, pf, size, cfg.L2_REFINE)))
        size *= 2
    values = [v for _, v in estimates]

    if values and max(values) == 0.0:
        return ConvergenceVerdict(estimates, Verdict.CONVERGENT, 0.0)
    exponent = fit_slope(np.log([g for g, _ in estimates]), np.log(np.maximum(values, 1e-300))) \
        if len(values) >= 2 else float("nan")
    changes = [relative_change(a, b) for a, b in zip(values, values[1:])]
    if len(changes) >= 2 and max(changes[-2:]) < cfg.L2_CONVERGENCE:
        verdict = Verdict.CONVERGENT
    elif len(values) >= 4 and exponent > cfg.DIVERGENCE_SLOPE and all(b > a for a, b in zip(values, values[1:])):
        verdict = Verdict.DIVERGENT
    else:
        verdict = Verdict.INCONCLUSIVE
    logger.info(f"📊 Квадратура L²: {verdict.value}, показатель роста {exponent:.3f}")
    return ConvergenceVerdict(estimates, verdict, float(exponent))


# ===== КОЭФФИЦИЕНТЫ ФУРЬЕ =====

def _trend(boxes: List[int], sums: List[float], tol: float) -> PartialSumTrend:
    slope = fit_slope(np.log(np.asarray(boxes, dtype=float) + 1.0), np.log(np.maximum(sums, 1e-300)))
    plateau = len(sums) >= 2 and relative_change(sums[-2], sums[-1]) < tol
    return PartialSumTrend(boxes, sums, slope, plateau)


def fourier_report(q: BivPoly, p: BivPoly, box: Tuple[int, int], grid: Optional[int] = None,
                   cfg=None) -> FourierReport:
    """
    Коэффициенты q/p на [0, J] x [0, K] по БПФ значений на сетке (grid >= 4·box)
    и рост частичных сумм ℓ¹, ℓ² и взвешенной ℓ¹ по вложенным квадратам.
    """
    cfg = cfg or default_config
    require_semistable(p, cfg)
    J, K = box
    need = 4 * (max(J, K) + 1)
    grid = grid or max(256, 1 << int(np.ceil(np.log2(need))))
    if max(J, K) >= grid // 2:
        raise PreconditionError("Квадрат коэффициентов выходит за границу Найквиста", box=[J, K], grid=grid)

    # 1. Значения на сдвинутой сетке и поправка фазы сдвига
    zs = unit_circle(grid, 0.5)
    values = q.to_float().eval_grid(zs, zs) / p.to_float().eval_grid(zs, zs)
    phase = np.exp(-1j * np.pi * np.arange(grid) / grid)
    coeffs = np.fft.fft2(values) / grid ** 2 * phase[:, None] * phase[None, :]
    block = coeffs[:J + 1, :K + 1]

    # 2. Частичные суммы по вложенным квадратам
    side = min(J, K)
    boxes = sorted({max(side >> s, 1) for s in range(4)})
    weights = np.outer(np.arange(J + 1) + 1.0, np.arange(K + 1) + 1.0)
    sums: Dict[str, List[float]] = {"l1": [], "l2": [], "weighted_l1": []}
    for r in boxes:
        part = np.abs(block[:r + 1, :r + 1])
        sums["l1"].append(float(part.sum()))
        sums["l2"].append(float(np.sqrt((part ** 2).sum())))
        sums["weighted_l1"].append(float((part * weights[:r + 1, :r + 1]).sum()))
    trends = {name: _trend(boxes, vals, cfg.PLATEAU_TOL) for name, vals in sums.items()}
    logger.info(f"📊 Фурье-отчёт {J}x{K} на сетке {grid}: "
                + ", ".join(f"{k} {'плато' if t.plateau else 'рост'}" for k, t in trends.items()))
    return FourierReport((J, K), grid, block, trends)


def export_csv(report: FourierReport, path: str) -> Path:
    """Сетка коэффициентов в CSV: j, k, re, im, abs"""
    out = Path(path)
    with out.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["j", "k", "re", "im", "abs"])
        for (j, k), c in np.ndenumerate(report.coefficients):
            w.writerow([j, k, repr(float(c.real)), repr(float(c.imag)), repr(float(abs(c)))])
    logger.info(f"✅ Коэффициенты записаны в {out}")
    return out


# ===== КРАТНОСТИ ЧЕРЕЗ РЕЗУЛЬТАНТЫ =====

def _gaussian_integer(rng: np.random.Generator, radius: int) -> sympy.Expr:
    while True:
        a, b = (int(v) for v in rng.integers(-radius, radius + 1, size=2))
        if a * a + b * b <= radius * radius:
            return sympy.Integer(a) + sympy.I * b


def _sheared(p: BivPoly, point: Tuple[Any, Any], s: sympy.Expr, t: sympy.Expr) -> sympy.Expr:
    """p(λ + S(u, v)) с S = [[1, s], [0, 1]]·[[1, 0], [t, 1]]"""
    x = _U + s * (t * _U + _V)
    y = t * _U + _V
    l1, l2 = (QQ_I.to_sympy(c) for c in point)
    expr = sum(QQ_I.to_sympy(c) * (x + l1) ** j * (y + l2) ** k for (j, k), c in p.terms().items())
    return sympy.expand(expr)


def _resultant_order(p1: BivPoly, p2: BivPoly, point: Tuple[Any, Any], s: sympy.Expr, t: sympy.Expr) -> int:
    g1 = _sheared(p1, point, s, t)
    g2 = _sheared(p2, point, s, t)
    res = sympy.resultant(g1, g2, _V)
    poly = Poly(res, _U, domain=QQ_I)
    if poly.is_zero:
        raise PreconditionError("Результант тождественно равен нулю: общий множитель")
    return min(e[0] for e in poly.monoms())


def resultant_multiplicity(p1: BivPoly, p2: BivPoly, point: Sequence[Any], seed: Optional[int] = None,
                           cfg=None) -> int:
    """
    Порядок Res_v в u = 0 после случайного сдвига-сдвига общего положения.

    Повторяется со свежими сдвигами, пока два не совпадут.
    """
    cfg = cfg or default_config
    if not (p1.is_exact and p2.is_exact):
        raise PreconditionError("Оракул результантов требует EXACT-бэкенда")
    lam = exact_point(point)
    rng = make_rng(cfg.SEED if seed is None else seed)
    seen: List[Tuple[sympy.Expr, sympy.Expr, int]] = []
    for attempt in range(cfg.SHEAR_RETRIES):
        s = _gaussian_integer(rng, cfg.SHEAR_RADIUS)
        t = _gaussian_integer(rng, cfg.SHEAR_RADIUS)
        order = _resultant_order(p1, p2, lam, s, t)
        logger.debug(f"🔍 Сдвиг s={s}, t={t}: порядок {order}")
        if any(o == order for _, _, o in seen):
            logger.info(f"✅ Кратность по результанту: {order} (попыток {attempt + 1})")
            return order
        seen.append((s, t, order))
    logger.error(f"❌ Сдвиги не согласовались: {[o for _, _, o in seen]}")
    raise NumericalFailure("Кратности по результантам для разных сдвигов не совпали",
                           orders=[o for _, _, o in seen], shears=[[str(s), str(t)] for s, t, _ in seen])


def multiplicity_crosscheck(p1: BivPoly, p2: BivPoly, point: Sequence[Any], seed: Optional[int] = None,
                            cfg=None) -> Dict[str, Any]:
    """Собственные подпространства, Фултон и результант в одной точке"""
    from .intersect import fulton_reduce, multiplicity

    cfg = cfg or default_config
    values = {
        "eigenspace": multiplicity(p1, p2, point, cfg),
        "fulton": fulton_reduce(p1, p2, point, cfg),
        "resultant": resultant_multiplicity(p1, p2, point, seed, cfg),
    }
    values["agree"] = len({values["eigenspace"], values["fulton"], values["resultant"]}) == 1
    if not values["agree"]:
        logger.warning(f"⚠️ Оракулы кратности расходятся: {values}")
    return values
