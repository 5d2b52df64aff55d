"""
Проверка полуустойчивости: нет нулей в открытом бидиске и нет общего
множителя с отражением.

Нули ищутся на срезах: z1 пробегает концентрические окружности внутри
диска, корни p(z1, ·) берутся как собственные значения сопровождающих
матриц. Это сертификат выборки, а не доказательство.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..config import config as default_config
from ..core.algebra import gcd
from ..core.bivpoly import BivPoly
from ..utils.errors import PreconditionError

logger = logging.getLogger(__name__)

MAX_WITNESSES = 50


@dataclass
class SemistabilityReport:
    gcd_trivial: bool
    zero_free_verified: bool
    resolution: Tuple[int, int]
    threshold: float
    min_modulus_observed: float
    witnesses: List[Tuple[complex, complex]] = field(default_factory=list)

    @property
    def semistable(self) -> bool:
        return self.gcd_trivial and self.zero_free_verified

    def to_dict(self):
        return {
            "gcd_trivial": self.gcd_trivial,
            "zero_free_verified": self.zero_free_verified,
            "semistable": self.semistable,
            "resolution": list(self.resolution),
            "threshold": self.threshold,
            "min_modulus_observed": self.min_modulus_observed,
            "witnesses": [list(w) for w in self.witnesses],
        }


def _batched_roots(coeffs: np.ndarray, rel_tol: float = 1e-14) -> List[np.ndarray]:
    """
    Корни многочленов по строкам coeffs (коэффициенты по возрастанию).

    Строки одинаковой фактической степени обрабатываются одним вызовом eigvals.
    None на месте тождественно нулевой строки.
    """
    count, width = coeffs.shape
    scale = np.max(np.abs(coeffs), axis=1)
    out: List[Optional[np.ndarray]] = [None] * count
    degrees = np.full(count, -1)
    for d in range(width - 1, -1, -1):
        mask = (degrees < 0) & (np.abs(coeffs[:, d]) > rel_tol * np.maximum(scale, 1e-300)) & (scale > 0)
        degrees[mask] = d
    for d in np.unique(degrees):
        idx = np.nonzero(degrees == d)[0]
        if d < 0:
            continue
        if d == 0:
            for i in idx:
                out[i] = np.array([], dtype=complex)
            continue
        lead = coeffs[idx, d][:, np.newaxis]
        monic = coeffs[idx, :d] / lead
        comp = np.zeros((len(idx), d, d), dtype=complex)
        comp[:, 1:, :-1] = np.eye(d - 1)
        comp[:, :, -1] = -monic
        roots = np.linalg.eigvals(comp)
        for row, i in enumerate(idx):
            out[i] = roots[row]
    return out


def _sweep(grid: np.ndarray, collar: float, radii: np.ndarray, angles: int):
    """Срезы по второй переменной при первой на окружностях радиусов radii"""
    n = grid.shape[0] - 1
    theta = 2 * np.pi * np.arange(angles) / angles
    samples = (radii[:, np.newaxis] * np.exp(1j * theta)[np.newaxis, :]).ravel()
    vander = np.power.outer(samples, np.arange(n + 1))
    slices = vander @ grid
    roots = _batched_roots(slices)

    # свидетели: корни в полосе |z2| < 1 + sqrt(collar)
    band = max(collar, float(np.sqrt(collar)))
    ok = True
    min_mod = np.inf
    witnesses = []
    for z, rts in zip(samples, roots):
        if rts is None:
            # p(z, ·) тождественно равен нулю
            ok = False
            witnesses.append((complex(z), 0j))
            continue
        if not rts.size:
            continue
        mods = np.abs(rts)
        min_mod = min(min_mod, float(np.min(mods)))
        if np.any(mods < 1 - collar):
            ok = False
        for r in rts[mods < 1 + band]:
            witnesses.append((complex(z), complex(r)))
    return ok, min_mod, witnesses


def check_semistable(p: BivPoly, resolution: Optional[Tuple[int, int]] = None,
                     threshold: Optional[float] = None, cfg=None) -> SemistabilityReport:
    """
    Сертификат полуустойчивости p.

    gcd_trivial считается точно, zero_free_verified - по выборке срезов
    в обеих переменных.
    """
    cfg = cfg or default_config
    if p.is_zero():
        raise PreconditionError("Нулевой многочлен не бывает полуустойчивым")
    radii_count, angles = resolution or (cfg.STABILITY_RADII, cfg.STABILITY_ANGLES)
    collar = cfg.STABILITY_COLLAR if threshold is None else threshold

    # 1. Точный НОД с отражением
    exact_p = p.to_exact()
    common = gcd(exact_p, exact_p.reflect())
    gcd_trivial = common.natural_bidegree == (0, 0)
    if not gcd_trivial:
        logger.info(f"⚠️ Общий множитель с отражением: {common}")

    # 2. Срезы по z2 при z1 в диске, затем наоборот
    radii = np.linspace(0.0, 1.0 - collar, radii_count)
    grid = p.float_coeffs
    ok1, min1, wit1 = _sweep(grid, collar, radii, angles)
    ok2, min2, wit2 = _sweep(grid.T, collar, radii, angles)
    witnesses = wit1 + [(b, a) for a, b in wit2]

    report = SemistabilityReport(
        gcd_trivial=gcd_trivial,
        zero_free_verified=ok1 and ok2,
        resolution=(radii_count, angles),
        threshold=collar,
        min_modulus_observed=min(min1, min2),
        witnesses=witnesses[:MAX_WITNESSES],
    )
    if report.semistable:
        logger.info(f"✅ Полуустойчивость подтверждена ({radii_count}x{angles})")
    else:
        logger.info(f"⚠️ Полуустойчивость не подтверждена: gcd={gcd_trivial}, "
                    f"нулей нет={report.zero_free_verified}")
    return report


def require_semistable(p: BivPoly, cfg=None) -> SemistabilityReport:
    report = check_semistable(p, cfg=cfg)
    if not report.semistable:
        raise PreconditionError(
            "Многочлен не полуустойчив",
            gcd_trivial=report.gcd_trivial,
            zero_free=report.zero_free_verified,
        )
    return report


def require_stable(p: BivPoly, cfg=None) -> SemistabilityReport:
    """Нет нулей на замкнутом бидиске: свидетелей у границы быть не должно"""
    cfg = cfg or default_config
    report = require_semistable(p, cfg)
    if report.witnesses:
        raise PreconditionError("Есть нули на границе бидиска: вес 1/|p|^2 не интегрируем",
                                witnesses=len(report.witnesses))
    return report
