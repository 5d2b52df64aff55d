"""
Однородные разложения p(u - ζ) в точке тора и деление однородных форм.

Работает для d >= 2 переменных; деление форм реализовано для d = 2.
"""
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import QQ_I, Poly, Symbol

from ..config import config as default_config
from ..utils.errors import InputFormatError, PreconditionError
from .bivpoly import BivPoly
from .scalars import (
    EXACT_ONE,
    EXACT_ZERO,
    Backend,
    GaussianRational,
    exact,
    exact_abs2,
    to_complex,
)

_X = Symbol("x")


def _is_zero(value: Any, tol: float) -> bool:
    if isinstance(value, GaussianRational):
        return value == EXACT_ZERO
    return abs(value) <= tol


@dataclass(frozen=True, eq=False)
class SparsePoly:
    """Многочлен от d переменных в виде словаря мономов"""
    terms: Dict[Tuple[int, ...], Any]
    nvars: int
    backend: Backend = Backend.EXACT

    @classmethod
    def from_bivpoly(cls, p: BivPoly) -> "SparsePoly":
        return cls(p.terms(), 2, p.backend)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def eval(self, point: Sequence[Any]) -> Any:
        total = EXACT_ZERO if self.backend is Backend.EXACT else 0j
        for exps, c in self.terms.items():
            term = c
            for x, e in zip(point, exps):
                term = term * x ** e
            total = total + term
        return total


@dataclass(frozen=True, eq=False)
class HomogForm:
    """Однородная форма степени degree от nvars переменных"""
    terms: Dict[Tuple[int, ...], Any]
    degree: int
    nvars: int = 2
    backend: Backend = Backend.EXACT

    @classmethod
    def zero(cls, degree: int, nvars: int = 2, backend: Backend = Backend.EXACT) -> "HomogForm":
        return cls({}, degree, nvars, backend)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Any], backend: Backend = Backend.EXACT) -> "HomogForm":
        """coeffs[t] стоит при ζ^(deg-t) η^t"""
        degree = len(coeffs) - 1
        terms = {(degree - t, t): c for t, c in enumerate(coeffs)}
        return cls(terms, degree, 2, backend).pruned()

    def pruned(self, tol: float = 0.0) -> "HomogForm":
        clean = {e: c for e, c in self.terms.items() if not _is_zero(c, tol)}
        return HomogForm(clean, self.degree, self.nvars, self.backend)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(_is_zero(c, tol) for c in self.terms.values())

    def norm(self) -> float:
        return max((abs(to_complex(c)) for c in self.terms.values()), default=0.0)

    def coeff_list(self) -> List[Any]:
        """Для d = 2: список коэффициентов при ζ^(deg-t) η^t"""
        if self.nvars != 2:
            raise PreconditionError("Список коэффициентов определён только для двух переменных")
        zero = EXACT_ZERO if self.backend is Backend.EXACT else 0j
        return [self.terms.get((self.degree - t, t), zero) for t in range(self.degree + 1)]

    def __add__(self, other: "HomogForm") -> "HomogForm":
        if other.degree != self.degree and not other.is_zero() and not self.is_zero():
            raise InputFormatError("Сложение однородных форм разной степени")
        degree = self.degree if not self.is_zero() else other.degree
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return HomogForm(terms, degree, self.nvars, self.backend).pruned()

    def __neg__(self) -> "HomogForm":
        return HomogForm({e: -c for e, c in self.terms.items()}, self.degree, self.nvars, self.backend)

    def __sub__(self, other: "HomogForm") -> "HomogForm":
        return self + (-other)

    def scale(self, factor: Any) -> "HomogForm":
        return HomogForm({e: c * factor for e, c in self.terms.items()},
                         self.degree, self.nvars, self.backend).pruned()

    def __mul__(self, other: "HomogForm") -> "HomogForm":
        terms: Dict[Tuple[int, ...], Any] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms[e] + c1 * c2 if e in terms else c1 * c2
        return HomogForm(terms, self.degree + other.degree, self.nvars, self.backend).pruned()

    def eval(self, point: Sequence[Any]) -> Any:
        return SparsePoly(self.terms, self.nvars, self.backend).eval(point)

    def names(self) -> Tuple[str, ...]:
        if self.nvars == 2:
            return ("ζ", "η")
        return tuple(f"ζ{i + 1}" for i in range(self.nvars))

    def to_dict(self) -> Dict[str, Any]:
        from .codec import format_terms, jsonable
        return {
            "degree": self.degree,
            "text": format_terms(self.terms, self.names()),
            "terms": [[list(e), jsonable(c)] for e, c in sorted(self.terms.items())],
        }

    def __str__(self) -> str:
        from .codec import format_terms
        return format_terms(self.terms, self.names())


@dataclass(frozen=True, eq=False)
class HomogExpansion:
    base_point: Tuple[Any, ...]
    forms: List[HomogForm]
    order: Union[int, float]
    backend: Backend = Backend.EXACT

    def form(self, j: int) -> HomogForm:
        if 0 <= j < len(self.forms):
            return self.forms[j]
        return HomogForm.zero(max(j, 0), len(self.base_point), self.backend)

    @property
    def bottom(self) -> HomogForm:
        if math.isinf(self.order):
            raise PreconditionError("Нулевой многочлен не имеет младшей формы")
        return self.forms[int(self.order)]

    def resubstitute(self) -> SparsePoly:
        """Σ P_j(u - z): обратная подстановка ζ = u - z"""
        d = len(self.base_point)
        acc: Dict[Tuple[int, ...], Any] = {}
        for form in self.forms:
            for exps, c in form.terms.items():
                for e, coeff in _shifted_monomial(exps, self.base_point, self.backend).items():
                    acc[e] = acc[e] + c * coeff if e in acc else c * coeff
        clean = {e: c for e, c in acc.items() if not _is_zero(c, 0.0)}
        return SparsePoly(clean, d, self.backend)

    def to_dict(self) -> Dict[str, Any]:
        from .codec import jsonable
        return {
            "base_point": jsonable(list(self.base_point)),
            "order": "inf" if math.isinf(self.order) else int(self.order),
            "forms": [f.to_dict() for f in self.forms],
        }


def _shifted_monomial(exps: Sequence[int], base: Sequence[Any], backend: Backend) -> Dict[Tuple[int, ...], Any]:
    """Разложение Π (u_i - x_i)^(a_i) по мономам x"""
    one = EXACT_ONE if backend is Backend.EXACT else 1 + 0j
    parts = []
    for a, u in zip(exps, base):
        row = {}
        for t in range(a + 1):
            row[t] = one * (math.comb(a, t) * (-1) ** t)
            for _ in range(a - t):
                row[t] = row[t] * u
        parts.append(row)
    out: Dict[Tuple[int, ...], Any] = {}
    for combo in product(*[list(r.items()) for r in parts]):
        e = tuple(t for t, _ in combo)
        c = one
        for _, v in combo:
            c = c * v
        out[e] = out[e] + c if e in out else c
    return out


def _on_torus(point: Sequence[Any], backend: Backend, tol: float) -> bool:
    for u in point:
        if isinstance(u, GaussianRational):
            if exact_abs2(u) != 1:
                return False
        elif abs(abs(complex(u)) - 1.0) > tol:
            return False
    return True


def homog_expand(p: Union[BivPoly, SparsePoly], base: Sequence[Any], cfg=None) -> HomogExpansion:
    """Формы p(base - ζ), сгруппированные по полной степени"""
    cfg = cfg or default_config
    poly = SparsePoly.from_bivpoly(p) if isinstance(p, BivPoly) else p
    if len(base) != poly.nvars:
        raise InputFormatError(f"Точка размерности {len(base)} для многочлена от {poly.nvars} переменных")
    if poly.backend is Backend.EXACT:
        base = tuple(u if isinstance(u, GaussianRational) else exact(u) for u in base)
    else:
        base = tuple(to_complex(u) for u in base)
    if not _on_torus(base, poly.backend, cfg.TORUS_TOL):
        raise PreconditionError("Точка разложения не лежит на торе", point=[str(u) for u in base])
    acc: Dict[Tuple[int, ...], Any] = {}
    for exps, c in poly.terms.items():
        for e, coeff in _shifted_monomial(exps, base, poly.backend).items():
            acc[e] = acc[e] + c * coeff if e in acc else c * coeff
    top = poly.total_degree()
    forms = [HomogForm({}, j, poly.nvars, poly.backend) for j in range(top + 1)]
    for e, c in acc.items():
        forms[sum(e)].terms[e] = c
    forms = [f.pruned() for f in forms]
    tol = 0.0 if poly.backend is Backend.EXACT else cfg.ORDER_TOL * max(
        (abs(to_complex(c)) for c in poly.terms.values()), default=0.0)
    order: Union[int, float] = math.inf
    for j, f in enumerate(forms):
        if not f.is_zero(tol):
            order = j
            break
    return HomogExpansion(base, forms, order, poly.backend)


# ===== ДЕЛЕНИЕ ФОРМ =====

def homog_divide(numer: HomogForm, denom: HomogForm, tol: Optional[float] = None) -> Optional[HomogForm]:
    """Частное однородных форм от двух переменных, если деление точное"""
    if numer.nvars != 2 or denom.nvars != 2:
        raise PreconditionError("Деление форм реализовано для двух переменных")
    exact_mode = numer.backend is Backend.EXACT and denom.backend is Backend.EXACT
    if tol is None:
        tol = 0.0 if exact_mode else default_config.HOMOG_DIVIDE_TOL
    for form in (numer, denom):
        if any(sum(e) != form.degree for e in form.terms):
            raise InputFormatError("Форма не однородна")
    if denom.is_zero(tol if not exact_mode else 0.0):
        raise PreconditionError("Деление на нулевую форму")
    q_deg = numer.degree - denom.degree
    backend = Backend.EXACT if exact_mode else Backend.FLOAT
    scale = max(numer.norm(), denom.norm(), 1e-300)
    if numer.is_zero(0.0 if exact_mode else tol * scale):
        return HomogForm.zero(max(q_deg, 0), 2, backend) if q_deg >= 0 else None
    if q_deg < 0:
        return None

    # Коэффициенты при ζ^t после подстановки η = 1: индекс t = степень ζ
    num = [numer.terms.get((t, numer.degree - t), 0) for t in range(numer.degree + 1)]
    den = [denom.terms.get((t, denom.degree - t), 0) for t in range(denom.degree + 1)]
    # Степень η, которую содержит форма, равна числу нулевых старших ζ-коэффициентов
    s_num = _eta_power(num, exact_mode, tol * scale)
    s_den = _eta_power(den, exact_mode, tol * scale)
    if s_den > s_num:
        return None
    num_core = num[:len(num) - s_num]
    den_core = den[:len(den) - s_den]

    if exact_mode:
        to_exact = lambda c: c if isinstance(c, GaussianRational) else exact(c)
        n_poly = Poly.from_list([to_exact(c) for c in reversed(num_core)], _X, domain=QQ_I)
        d_poly = Poly.from_list([to_exact(c) for c in reversed(den_core)], _X, domain=QQ_I)
        quot, rem = n_poly.div(d_poly)
        if not rem.is_zero:
            return None
        q_list = list(reversed(quot.all_coeffs()))
        q_list = [QQ_I.from_sympy(c) for c in q_list]
    else:
        n_arr = np.array([to_complex(c) for c in num_core])
        d_arr = np.array([to_complex(c) for c in den_core])
        quot, rem = np.polynomial.polynomial.polydiv(n_arr, d_arr)
        if rem.size and np.max(np.abs(rem)) > tol * scale:
            return None
        q_list = list(quot)

    # Восстановление однородности: ζ^t η^(q_deg - t)
    terms = {}
    for t, c in enumerate(q_list):
        if t <= q_deg:
            terms[(t, q_deg - t)] = c
        elif not _is_zero(c, tol * scale):
            return None
    return HomogForm(terms, q_deg, 2, backend).pruned(0.0 if exact_mode else tol * scale)


def _eta_power(coeffs: List[Any], exact_mode: bool, tol: float) -> int:
    s = 0
    for c in reversed(coeffs):
        if _is_zero(c if not exact_mode or isinstance(c, GaussianRational) else exact(c), tol):
            s += 1
        else:
            break
    return s
