"""
Матричные многочлены и матричные многочлены Лорана от одной переменной.

Коэффициенты хранятся как массив формы (степень + 1, строки, столбцы).
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..utils.errors import InputFormatError

logger = logging.getLogger(__name__)


def _as_stack(coeffs: Any) -> np.ndarray:
    arr = np.array(coeffs, dtype=complex)
    if arr.ndim == 2:
        arr = arr[np.newaxis]
    if arr.ndim != 3 or arr.shape[0] == 0:
        raise InputFormatError("Ожидался массив матричных коэффициентов формы (d+1, r, c)")
    return arr


def unit_circle(count: int, offset: float = 0.0) -> np.ndarray:
    return np.exp(2j * np.pi * (np.arange(count) + offset) / count)


def flip_matrix(size: int) -> np.ndarray:
    """Матрица X_N с единицами на побочной диагонали"""
    return np.eye(size, dtype=complex)[::-1]


@dataclass(frozen=True, eq=False)
class UniMatPoly:
    coeffs: np.ndarray
    variable: str = "z"

    def __post_init__(self):
        arr = _as_stack(self.coeffs)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    # ===== КОНСТРУКТОРЫ =====

    @classmethod
    def identity(cls, size: int, variable: str = "z") -> "UniMatPoly":
        return cls(np.eye(size, dtype=complex)[np.newaxis], variable)

    @classmethod
    def zero(cls, rows: int, cols: int, degree: int = 0, variable: str = "z") -> "UniMatPoly":
        return cls(np.zeros((degree + 1, rows, cols), dtype=complex), variable)

    @classmethod
    def lambda_vector(cls, size: int, variable: str = "z") -> "UniMatPoly":
        """Столбец Λ_N(z) = (1, z, ..., z^(N-1))^T"""
        arr = np.zeros((max(size, 1), size, 1), dtype=complex)
        for k in range(size):
            arr[k, k, 0] = 1.0
        return cls(arr, variable)

    # ===== СВОЙСТВА =====

    @property
    def rows(self) -> int:
        return self.coeffs.shape[1]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[2]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def natural_degree(self, tol: float = 0.0) -> int:
        for k in range(self.degree, -1, -1):
            if np.max(np.abs(self.coeffs[k]), initial=0.0) > tol:
                return k
        return -1

    # ===== ВЫЧИСЛЕНИЕ =====

    def eval(self, z: complex) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for k in range(self.degree, -1, -1):
            out = out * z + self.coeffs[k]
        return out

    def eval_many(self, zs: np.ndarray) -> np.ndarray:
        powers = np.power.outer(np.asarray(zs, dtype=complex), np.arange(self.degree + 1))
        return np.einsum("sk,kij->sij", powers, self.coeffs)

    # ===== АРИФМЕТИКА =====

    def padded(self, degree: int) -> "UniMatPoly":
        if degree < self.degree:
            return self.truncated(degree)
        arr = np.zeros((degree + 1, self.rows, self.cols), dtype=complex)
        arr[:self.degree + 1] = self.coeffs
        return UniMatPoly(arr, self.variable)

    def truncated(self, degree: int) -> "UniMatPoly":
        return UniMatPoly(self.coeffs[:degree + 1].copy(), self.variable)

    def __add__(self, other: "UniMatPoly") -> "UniMatPoly":
        d = max(self.degree, other.degree)
        return UniMatPoly(self.padded(d).coeffs + other.padded(d).coeffs, self.variable)

    def __sub__(self, other: "UniMatPoly") -> "UniMatPoly":
        d = max(self.degree, other.degree)
        return UniMatPoly(self.padded(d).coeffs - other.padded(d).coeffs, self.variable)

    def __matmul__(self, other: "UniMatPoly") -> "UniMatPoly":
        if self.cols != other.rows:
            raise InputFormatError(f"Несогласованные размеры {self.rows}x{self.cols} и {other.rows}x{other.cols}")
        out = np.zeros((self.degree + other.degree + 1, self.rows, other.cols), dtype=complex)
        for a in range(self.degree + 1):
            for b in range(other.degree + 1):
                out[a + b] += self.coeffs[a] @ other.coeffs[b]
        return UniMatPoly(out, self.variable)

    def left(self, matrix: np.ndarray) -> "UniMatPoly":
        return UniMatPoly(np.einsum("ij,kjl->kil", matrix, self.coeffs), self.variable)

    def right(self, matrix: np.ndarray) -> "UniMatPoly":
        return UniMatPoly(np.einsum("kij,jl->kil", self.coeffs, matrix), self.variable)

    def reflection(self, degree: Optional[int] = None) -> "UniMatPoly":
        """z^d conj(E(1/conj z)) поэлементно, без транспонирования"""
        degree = self.degree if degree is None else degree
        padded = self.padded(degree)
        return UniMatPoly(np.conj(padded.coeffs[::-1]), self.variable)

    def hermitian_square(self) -> "LaurentMat":
        """E*(z) E(z) на окружности как матричный многочлен Лорана"""
        d = self.degree
        out = np.zeros((2 * d + 1, self.cols, self.cols), dtype=complex)
        for a in range(d + 1):
            for b in range(d + 1):
                out[d + b - a] += self.coeffs[a].conj().T @ self.coeffs[b]
        return LaurentMat(out)

    # ===== ОПРЕДЕЛИТЕЛЬ =====

    def det_coeffs(self) -> np.ndarray:
        """Коэффициенты det E(z) по возрастанию степеней (восстановление по FFT)"""
        if self.rows != self.cols:
            raise InputFormatError("Определитель неквадратной матрицы")
        top = self.rows * self.degree
        count = 1 << max(int(np.ceil(np.log2(top + 1))), 0)
        values = np.linalg.det(self.eval_many(unit_circle(count)))
        coeffs = np.fft.fft(values) / count
        return coeffs[:top + 1]

    def det_roots(self, tol: float = 1e-12) -> np.ndarray:
        coeffs = self.det_coeffs()
        scale = np.max(np.abs(coeffs), initial=0.0)
        if scale == 0.0:
            return np.array([], dtype=complex)
        coeffs = np.where(np.abs(coeffs) > tol * scale, coeffs, 0)
        nz = np.nonzero(coeffs)[0]
        trimmed = coeffs[:nz[-1] + 1]
        if trimmed.size <= 1:
            return np.array([], dtype=complex)
        return np.roots(trimmed[::-1])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variable": self.variable,
            "shape": [self.rows, self.cols],
            "degree": self.degree,
            "coeffs": self.coeffs,
        }


@dataclass(frozen=True, eq=False)
class LaurentMat:
    """T(z) = Σ_{|l| ≤ d} T_l z^l; coeffs[d + l] хранит T_l"""
    coeffs: np.ndarray

    def __post_init__(self):
        arr = _as_stack(self.coeffs)
        if arr.shape[0] % 2 == 0:
            raise InputFormatError("Число коэффициентов многочлена Лорана должно быть нечётным")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def identity(cls, size: int) -> "LaurentMat":
        return cls(np.eye(size, dtype=complex)[np.newaxis])

    @classmethod
    def from_samples(cls, zs: np.ndarray, values: np.ndarray, degree: int) -> "LaurentMat":
        """Проекция выборок на равномерной сетке окружности на степени |l| ≤ degree"""
        zs = np.asarray(zs, dtype=complex)
        lags = np.arange(-degree, degree + 1)
        weights = np.power.outer(zs, -lags) / len(zs)
        return cls(np.einsum("sl,sij->lij", weights, values))

    @property
    def degree(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def size(self) -> int:
        return self.coeffs.shape[1]

    def lag(self, ell: int) -> np.ndarray:
        if abs(ell) > self.degree:
            return np.zeros((self.size, self.size), dtype=complex)
        return self.coeffs[self.degree + ell]

    def eval(self, z: complex) -> np.ndarray:
        return self.eval_many(np.array([z]))[0]

    def eval_many(self, zs: np.ndarray) -> np.ndarray:
        lags = np.arange(-self.degree, self.degree + 1)
        powers = np.power.outer(np.asarray(zs, dtype=complex), lags)
        return np.einsum("sl,lij->sij", powers, self.coeffs)

    def __sub__(self, other: "LaurentMat") -> "LaurentMat":
        d = max(self.degree, other.degree)
        lags = range(-d, d + 1)
        return LaurentMat(np.array([self.lag(l) - other.lag(l) for l in lags]))

    def hermitian_defect(self) -> float:
        """max |T_{-l} - T_l^*|"""
        return max(float(np.max(np.abs(self.lag(-l) - self.lag(l).conj().T), initial=0.0))
                   for l in range(self.degree + 1))

    def max_abs_on_circle(self, count: int) -> float:
        return float(np.max(np.abs(self.eval_many(unit_circle(count, 0.5)))))

    def min_eigenvalue(self, count: int) -> float:
        values = self.eval_many(unit_circle(count, 0.5))
        values = 0.5 * (values + np.conj(np.swapaxes(values, 1, 2)))
        return float(np.min(np.linalg.eigvalsh(values)))

    def scalar_laurent(self) -> np.ndarray:
        """Для размера 1: коэффициенты z^d T(z) по возрастанию"""
        return self.coeffs[:, 0, 0].copy()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "size": self.size,
            "degree": self.degree,
            "lags": {str(l): self.lag(l) for l in range(-self.degree, self.degree + 1)},
        }


def vstack(polys: Sequence[UniMatPoly]) -> UniMatPoly:
    d = max(p.degree for p in polys)
    return UniMatPoly(np.concatenate([p.padded(d).coeffs for p in polys], axis=1), polys[0].variable)
