"""
Двумерные многочлены с объявленной бистепенью.

Коэффициент c[j, k] стоит при z1^j z2^k. Бистепень (n, m) задаётся
размером сетки, а не фактическими степенями: от неё зависит отражение.
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np
import sympy
from scipy.signal import convolve2d
from sympy import QQ_I, Poly

from ..utils.errors import InputFormatError, PreconditionError
from .scalars import (
    EXACT_ONE,
    EXACT_ZERO,
    Backend,
    GaussianRational,
    array_is_zero,
    conj_array,
    exact,
    exact_from_complex,
    max_abs,
    require_same_backend,
    to_complex,
    to_exact_array,
    to_float_array,
    zeros,
)

Z1, Z2 = sympy.symbols("z1 z2")


def _coerce_grid(values: Any, backend: Backend) -> np.ndarray:
    if backend is Backend.EXACT:
        grid = np.array(values, dtype=object)
        if grid.ndim != 2:
            raise InputFormatError("Сетка коэффициентов должна быть двумерной")
        out = np.empty(grid.shape, dtype=object)
        for idx, v in np.ndenumerate(grid):
            if isinstance(v, GaussianRational):
                out[idx] = v
            elif isinstance(v, (complex, float, np.floating, np.complexfloating)):
                raise InputFormatError("Число с плавающей точкой в EXACT-многочлене")
            else:
                out[idx] = exact(v)
        return out
    grid = np.array(values, dtype=object)
    if grid.ndim != 2:
        raise InputFormatError("Сетка коэффициентов должна быть двумерной")
    return np.vectorize(to_complex, otypes=[complex])(grid) if grid.size else np.zeros(grid.shape, dtype=complex)


@dataclass(frozen=True, eq=False)
class BivPoly:
    coeffs: np.ndarray
    backend: Backend = Backend.EXACT

    def __post_init__(self):
        grid = _coerce_grid(self.coeffs, self.backend)
        if 0 in grid.shape:
            raise InputFormatError("Пустая сетка коэффициентов")
        grid.setflags(write=False)
        object.__setattr__(self, "coeffs", grid)

    # ===== КОНСТРУКТОРЫ =====

    @classmethod
    def zero(cls, n: int, m: int, backend: Backend = Backend.EXACT) -> "BivPoly":
        return cls(zeros((n + 1, m + 1), backend), backend)

    @classmethod
    def constant(cls, value: Any, n: int = 0, m: int = 0, backend: Backend = Backend.EXACT) -> "BivPoly":
        grid = zeros((n + 1, m + 1), backend)
        grid[0, 0] = exact(value) if backend is Backend.EXACT and not isinstance(value, GaussianRational) else value
        return cls(grid, backend)

    @classmethod
    def from_terms(cls, terms: Dict[Tuple[int, int], Any], bidegree: Optional[Tuple[int, int]] = None,
                   backend: Backend = Backend.EXACT) -> "BivPoly":
        if bidegree is None:
            n = max((j for j, _ in terms), default=0)
            m = max((k for _, k in terms), default=0)
        else:
            n, m = bidegree
        grid = zeros((n + 1, m + 1), backend)
        for (j, k), value in terms.items():
            if j > n or k > m or j < 0 or k < 0:
                raise InputFormatError(f"Моном z1^{j} z2^{k} вне объявленной бистепени ({n}, {m})")
            grid[j, k] = value
        return cls(grid, backend)

    @classmethod
    def from_expr(cls, text: str, bidegree: Optional[Tuple[int, int]] = None,
                  backend: Backend = Backend.EXACT) -> "BivPoly":
        """Разбор выражения вида "4 - z1 - 3*z2 - z1*z2 + z2**2" """
        try:
            expr = sympy.sympify(text, locals={"z1": Z1, "z2": Z2, "I": sympy.I})
        except (sympy.SympifyError, SyntaxError, TypeError) as e:
            raise InputFormatError(f"Не удалось разобрать выражение {text!r}: {e}")
        if backend is Backend.EXACT:
            try:
                poly = Poly(expr, Z1, Z2, domain=QQ_I)
            except Exception as e:
                raise InputFormatError(f"Выражение не над гауссовыми рациональными: {e}")
            terms = dict(poly.as_dict(native=True))
        else:
            try:
                poly = Poly(expr, Z1, Z2)
            except sympy.PolynomialError as e:
                raise InputFormatError(f"Выражение не является многочленом: {e}")
            terms = {monom: complex(sympy.N(c, 20)) for monom, c in poly.terms()}
        return cls.from_terms(terms, bidegree, backend)

    # ===== СВОЙСТВА =====

    @property
    def bidegree(self) -> Tuple[int, int]:
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    @property
    def natural_bidegree(self) -> Tuple[int, int]:
        rows = [j for j in range(self.coeffs.shape[0]) if not array_is_zero(self.coeffs[j, :])]
        cols = [k for k in range(self.coeffs.shape[1]) if not array_is_zero(self.coeffs[:, k])]
        if not rows:
            return -1, -1
        return max(rows), max(cols)

    @property
    def is_exact(self) -> bool:
        return self.backend is Backend.EXACT

    def is_zero(self, tol: float = 0.0) -> bool:
        return array_is_zero(self.coeffs, tol)

    def norm(self) -> float:
        """Максимум модулей коэффициентов"""
        return max_abs(self.coeffs)

    def terms(self) -> Dict[Tuple[int, int], Any]:
        out = {}
        for (j, k), v in np.ndenumerate(self.coeffs):
            if (v != EXACT_ZERO) if self.is_exact else (v != 0):
                out[(int(j), int(k))] = v
        return out

    # ===== ОТРАЖЕНИЯ И ЗАМЕНЫ ПЕРЕМЕННЫХ =====

    def reflect(self) -> "BivPoly":
        """z1^n z2^m conj(p(1/conj z1, 1/conj z2)) при объявленной бистепени"""
        return BivPoly(conj_array(self.coeffs)[::-1, ::-1], self.backend)

    def flip1(self) -> "BivPoly":
        return BivPoly(self.coeffs[::-1, :], self.backend)

    def flip2(self) -> "BivPoly":
        """z2^m p(z1, 1/z2)"""
        return BivPoly(self.coeffs[:, ::-1], self.backend)

    def swap(self) -> "BivPoly":
        return BivPoly(self.coeffs.T, self.backend)

    def conj(self) -> "BivPoly":
        return BivPoly(conj_array(self.coeffs), self.backend)

    def rotate(self, u1: Any, u2: Any) -> "BivPoly":
        """p(u1 z1, u2 z2)"""
        n, m = self.bidegree
        grid = zeros(self.coeffs.shape, self.backend)
        if self.is_exact:
            p1 = [EXACT_ONE]
            p2 = [EXACT_ONE]
            for _ in range(n):
                p1.append(p1[-1] * u1)
            for _ in range(m):
                p2.append(p2[-1] * u2)
        else:
            p1 = to_complex(u1) ** np.arange(n + 1)
            p2 = to_complex(u2) ** np.arange(m + 1)
        for j in range(n + 1):
            for k in range(m + 1):
                grid[j, k] = self.coeffs[j, k] * p1[j] * p2[k]
        return BivPoly(grid, self.backend)

    def with_bidegree(self, n: int, m: int) -> "BivPoly":
        """Дополняет нулями или обрезает нулевые строки и столбцы"""
        nn, mm = self.natural_bidegree
        if nn > n or mm > m:
            raise PreconditionError(
                f"Фактическая бистепень ({nn}, {mm}) превышает запрошенную ({n}, {m})")
        grid = zeros((n + 1, m + 1), self.backend)
        a = min(n + 1, self.coeffs.shape[0])
        b = min(m + 1, self.coeffs.shape[1])
        grid[:a, :b] = self.coeffs[:a, :b]
        return BivPoly(grid, self.backend)

    # ===== АРИФМЕТИКА =====

    def _aligned(self, other: "BivPoly"):
        require_same_backend(self.backend, other.backend)
        n = max(self.bidegree[0], other.bidegree[0])
        m = max(self.bidegree[1], other.bidegree[1])
        a = zeros((n + 1, m + 1), self.backend)
        b = zeros((n + 1, m + 1), self.backend)
        a[:self.coeffs.shape[0], :self.coeffs.shape[1]] = self.coeffs
        b[:other.coeffs.shape[0], :other.coeffs.shape[1]] = other.coeffs
        return a, b

    def __add__(self, other: "BivPoly") -> "BivPoly":
        a, b = self._aligned(other)
        return BivPoly(a + b, self.backend)

    def __sub__(self, other: "BivPoly") -> "BivPoly":
        a, b = self._aligned(other)
        return BivPoly(a - b, self.backend)

    def __neg__(self) -> "BivPoly":
        return BivPoly(-self.coeffs, self.backend)

    def scale(self, factor: Any) -> "BivPoly":
        if self.is_exact and not isinstance(factor, GaussianRational):
            factor = exact(factor)
        elif not self.is_exact:
            factor = to_complex(factor)
        return BivPoly(self.coeffs * factor, self.backend)

    def __mul__(self, other: "BivPoly") -> "BivPoly":
        require_same_backend(self.backend, other.backend)
        if not self.is_exact:
            return BivPoly(convolve2d(self.coeffs, other.coeffs), self.backend)
        (n1, m1), (n2, m2) = self.bidegree, other.bidegree
        grid = zeros((n1 + n2 + 1, m1 + m2 + 1), self.backend)
        for (j1, k1), a in self.terms().items():
            for (j2, k2), b in other.terms().items():
                grid[j1 + j2, k1 + k2] = grid[j1 + j2, k1 + k2] + a * b
        return BivPoly(grid, self.backend)

    def monomial_shift(self, a1: int, a2: int) -> "BivPoly":
        """z1^a1 z2^a2 p с увеличением объявленной бистепени"""
        n, m = self.bidegree
        grid = zeros((n + a1 + 1, m + a2 + 1), self.backend)
        grid[a1:, a2:] = self.coeffs
        return BivPoly(grid, self.backend)

    def derivative(self, axis: int) -> "BivPoly":
        """Частная производная, бистепень сохраняется"""
        n, m = self.bidegree
        grid = zeros((n + 1, m + 1), self.backend)
        if axis == 0:
            for j in range(1, n + 1):
                grid[j - 1, :] = self.coeffs[j, :] * j
        else:
            for k in range(1, m + 1):
                grid[:, k - 1] = self.coeffs[:, k] * k
        return BivPoly(grid, self.backend)

    def z_derivative(self, axis: int) -> "BivPoly":
        """z_j * dp/dz_j"""
        n, m = self.bidegree
        grid = zeros((n + 1, m + 1), self.backend)
        if axis == 0:
            for j in range(n + 1):
                grid[j, :] = self.coeffs[j, :] * j
        else:
            for k in range(m + 1):
                grid[:, k] = self.coeffs[:, k] * k
        return BivPoly(grid, self.backend)

    # ===== ВЫЧИСЛЕНИЕ =====

    def eval(self, z1: Any, z2: Any) -> np.ndarray:
        """Численное значение (массивы транслируются)"""
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        return np.polynomial.polynomial.polyval2d(z1, z2, self.float_coeffs)

    def eval_grid(self, z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
        """Значения на декартовой сетке: result[a, b] = p(z1[a], z2[b])"""
        n, m = self.bidegree
        v1 = np.power.outer(np.asarray(z1, dtype=complex), np.arange(n + 1))
        v2 = np.power.outer(np.asarray(z2, dtype=complex), np.arange(m + 1))
        return v1 @ self.float_coeffs @ v2.T

    def eval_exact(self, z1: GaussianRational, z2: GaussianRational) -> GaussianRational:
        if not self.is_exact:
            raise PreconditionError("Точное вычисление требует EXACT-бэкенда")
        total = EXACT_ZERO
        n, m = self.bidegree
        for j in range(n, -1, -1):
            row = EXACT_ZERO
            for k in range(m, -1, -1):
                row = row * z2 + self.coeffs[j, k]
            total = total * z1 + row
        return total

    @property
    def float_coeffs(self) -> np.ndarray:
        return to_float_array(self.coeffs)

    def to_float(self) -> "BivPoly":
        if not self.is_exact:
            return self
        return BivPoly(self.float_coeffs, Backend.FLOAT)

    def to_exact(self) -> "BivPoly":
        """Точное двоичное представление FLOAT-коэффициентов"""
        if self.is_exact:
            return self
        return BivPoly(to_exact_array(self.coeffs), Backend.EXACT)

    def to_backend(self, backend: Backend) -> "BivPoly":
        return self.to_exact() if backend is Backend.EXACT else self.to_float()

    def equals(self, other: "BivPoly", tol: float = 0.0) -> bool:
        if self.backend is not other.backend:
            return False
        a, b = self._aligned(other)
        return array_is_zero(a - b, tol)

    def to_dict(self) -> Dict[str, Any]:
        from .codec import format_poly, poly_to_dict
        data = poly_to_dict(self)
        data["text"] = format_poly(self)
        return data

    def __str__(self) -> str:
        from .codec import format_poly
        return format_poly(self)

    def __repr__(self) -> str:
        return f"BivPoly({self}, bidegree={self.bidegree}, backend={self.backend.value})"


def exact_point(values: Iterable[Any]) -> Tuple[GaussianRational, ...]:
    out = []
    for v in values:
        if isinstance(v, GaussianRational):
            out.append(v)
        elif isinstance(v, complex):
            out.append(exact_from_complex(v))
        else:
            out.append(exact(v))
    return tuple(out)
