"""
Полный анализ многочлена с перекрёстными проверками модулей.

Каждая проверка получает PASS или FAIL; исключение внутри проверки
превращается в FAIL с сообщением, а не обрывает весь анализ.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from ..config import config as default_config
from ..core.bivpoly import BivPoly
from ..core.codec import format_scalar
from ..utils.errors import StablePolyError
from .agler import AglerSystem, alternate_pair, canonical_system, eont_residual, realize, verify_agler
from .boundary import BoundaryAnalysis, regularity_ladder
from .gram import gram_model
from .ideal import IdealDescription, MembershipMode, codimension, generators, membership
from .intersect import IntersectionReport, Region, reflection_pair
from .oracle import multiplicity_crosscheck
from .stability import SemistabilityReport, check_semistable

logger = logging.getLogger(__name__)

VERSION = "1.0.0"


@dataclass
class Check:
    name: str
    passed: bool
    detail: Any = None

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "status": "PASS" if self.passed else "FAIL", "detail": self.detail}


@dataclass
class AnalysisBundle:
    input: Dict[str, Any]
    seed: int
    config_echo: Dict[str, Any]
    semistability: Optional[SemistabilityReport] = None
    agler: Optional[AglerSystem] = None
    intersections: Optional[IntersectionReport] = None
    ideal: Optional[IdealDescription] = None
    boundary: List[BoundaryAnalysis] = field(default_factory=list)
    oracle: List[Dict[str, Any]] = field(default_factory=list)
    checks: List[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": VERSION,
            "input": self.input,
            "seed": self.seed,
            "config": self.config_echo,
            "semistability": self.semistability.to_dict() if self.semistability else None,
            "agler": self.agler.to_dict() if self.agler else None,
            "intersections": self.intersections.to_dict() if self.intersections else None,
            "ideal": self.ideal.to_dict() if self.ideal else None,
            "boundary": [b.to_dict() for b in self.boundary],
            "oracle": self.oracle,
            "checks": [c.to_dict() for c in self.checks],
            "status": "PASS" if self.ok else "FAIL",
        }


def _label(point) -> str:
    return "(" + ", ".join(format_scalar(c) for c in point) + ")"


def _guarded(bundle: AnalysisBundle, name: str, action: Callable[[], Any]) -> Any:
    """Выполняет шаг; ошибка пакета становится FAIL-проверкой"""
    try:
        return action()
    except StablePolyError as e:
        logger.warning(f"⚠️ Шаг {name} завершился ошибкой: {e.message}")
        bundle.checks.append(Check(name, False, e.to_dict()))
        return None


def analyze(p: BivPoly, seed: Optional[int] = None, cfg=None) -> AnalysisBundle:
    """Все модули подряд и сводка согласованности"""
    cfg = cfg or default_config
    seed = cfg.SEED if seed is None else seed
    cfg = cfg.with_overrides({"SEED": seed})
    bundle = AnalysisBundle(input=p.to_dict(), seed=seed, config_echo=cfg.echo())
    scale = max(1.0, p.norm() ** 2)
    n, m = p.bidegree

    # 1. Полуустойчивость
    bundle.semistability = check_semistable(p, cfg=cfg)
    bundle.checks.append(Check("semistable", bundle.semistability.semistable))
    if not bundle.semistability.semistable:
        logger.error("❌ Многочлен не полуустойчив, дальнейший анализ пропущен")
        return bundle

    # 2. Пересечения p и p̃
    report = _guarded(bundle, "intersections", lambda: reflection_pair(p, cfg))
    bundle.intersections = report
    if report is not None:
        bundle.checks.append(Check("bezout", report.total == report.bezout,
                                   {"total": report.total, "bezout": report.bezout}))
        bundle.checks.append(Check("torus_even", report.torus_total % 2 == 0, report.torus_total))

    # 3. Система Аглера и реализация
    system = _guarded(bundle, "agler", lambda: canonical_system(p, cfg, check=False))
    bundle.agler = system
    if system is not None:
        bundle.checks.append(Check("agler_identity", system.identity_residual <= cfg.AGLER_TOL * scale,
                                   system.identity_residual))
        F1, E2 = alternate_pair(p, system, cfg)
        alt = verify_agler(p, F1, E2)
        bundle.checks.append(Check("alternate_pair", alt <= cfg.AGLER_TOL * scale, alt))
        eont = eont_residual(p, system=system, seed=seed, cfg=cfg)
        bundle.checks.append(Check("eont", eont <= cfg.AGLER_TOL * scale, eont))
        if report is not None:
            expected = n * m - report.torus_total // 2
            bundle.checks.append(Check("dim_G", system.dim_G == expected,
                                       {"dim_G": system.dim_G, "formula": expected}))
        real = _guarded(bundle, "realization", lambda: realize(p, system.E1, system.F2, cfg))
        if real is not None:
            bundle.checks.append(Check("unitarity", real.unitarity_residual <= cfg.UNITARY_TOL,
                                       real.unitarity_residual))
            bundle.checks.append(Check("transfer", real.transfer_residual <= cfg.TRANSFER_TOL,
                                       real.transfer_residual))

    # 4. Идеал
    if system is not None:
        ideal = _guarded(bundle, "ideal", lambda: generators(p, system, cfg))
        bundle.ideal = ideal
        if ideal is not None:
            if ideal.exact_generators is not None:
                codim = _guarded(bundle, "codimension", lambda: codimension(p, ideal, cfg))
                if codim is not None:
                    bundle.checks.append(Check("codimension", codim == ideal.torus_count // 2, codim))
            reflected = _guarded(bundle, "membership",
                                 lambda: membership(p, p.reflect(), MembershipMode.EXACT, ideal, cfg))
            if reflected is not None:
                bundle.checks.append(Check("reflection_in_ideal", reflected.member, reflected.mode.value))

    # 5. Граница и оракулы в нулях на торе
    if report is not None:
        for zero in report.in_region(Region.TORUS):
            analysis = _guarded(bundle, "boundary", lambda: regularity_ladder(p, zero.point, cfg=cfg))
            if analysis is None:
                continue
            bundle.boundary.append(analysis)
            bundle.checks.append(Check(f"bottom_form@{_label(zero.point)}", analysis.bottom_ok))
            if analysis.floor_ok is not None:
                bundle.checks.append(Check(f"multiplicity_floor@{_label(zero.point)}", analysis.floor_ok,
                                           {"N": analysis.intersection_multiplicity,
                                            "floor": analysis.multiplicity_floor}))
            if p.is_exact and zero.exact:
                table = _guarded(bundle, "oracle",
                                 lambda: multiplicity_crosscheck(p, p.reflect(), zero.point, seed, cfg))
                if table is not None:
                    table["point"] = _label(zero.point)
                    bundle.oracle.append(table)
                    bundle.checks.append(Check(f"multiplicity_oracles@{_label(zero.point)}", table["agree"], table))

    # 6. Модель Грама для многочленов без нулей на торе
    if report is not None and report.torus_total == 0 and n and m:
        model = _guarded(bundle, "gram", lambda: gram_model(p, cfg=cfg))
        if model is not None:
            bundle.checks.append(Check("gram_spectrum", model.spectrum_match, model.spectrum_error))
            bundle.checks.append(Check("gram_dim", model.dim_match,
                                       {"dim_G": model.dim_G, "formula": model.dim_formula}))

    failed = [c.name for c in bundle.checks if not c.passed]
    if failed:
        logger.warning(f"⚠️ Проверки с FAIL: {', '.join(failed)}")
    else:
        logger.info(f"✅ Все {len(bundle.checks)} проверок пройдены")
    return bundle
