"""
Векторные многочлены и их эрмитовы ядра.

Вектор A хранится тензором C формы (dim, n+1, m+1): A_i(z) = Σ C[i, j, k] z1^j z2^k.
Ядро A(w)* A(z) хранится тензором K[b1, b2, a1, a2] при z^a conj(w)^b.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import InputFormatError
from .bivpoly import BivPoly
from .matpoly import UniMatPoly
from .scalars import Backend

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VecPoly:
    tensor: np.ndarray

    def __post_init__(self):
        arr = np.array(self.tensor, dtype=complex)
        if arr.ndim != 3:
            raise InputFormatError("Тензор векторного многочлена должен иметь форму (dim, n+1, m+1)")
        arr.setflags(write=False)
        object.__setattr__(self, "tensor", arr)

    @classmethod
    def zero(cls, dim: int, n: int, m: int) -> "VecPoly":
        return cls(np.zeros((dim, n + 1, m + 1), dtype=complex))

    @classmethod
    def from_polys(cls, polys: Sequence[BivPoly], bidegree: Optional[Tuple[int, int]] = None) -> "VecPoly":
        if bidegree is None:
            bidegree = (max(p.bidegree[0] for p in polys), max(p.bidegree[1] for p in polys))
        n, m = bidegree
        arr = np.zeros((len(polys), n + 1, m + 1), dtype=complex)
        for i, p in enumerate(polys):
            c = p.float_coeffs
            arr[i, :c.shape[0], :c.shape[1]] = c[:n + 1, :m + 1]
        return cls(arr)

    @classmethod
    def from_matrix_z2(cls, mat: UniMatPoly) -> "VecPoly":
        """A(z) = E(z2) Λ_N(z1), E квадратная N x N"""
        return cls(np.transpose(mat.coeffs, (1, 2, 0)))

    @classmethod
    def from_matrix_z1(cls, mat: UniMatPoly) -> "VecPoly":
        """A(z) = E(z1) Λ_N(z2)"""
        return cls(np.transpose(mat.coeffs, (1, 0, 2)))

    @property
    def dim(self) -> int:
        return self.tensor.shape[0]

    @property
    def bidegree(self) -> Tuple[int, int]:
        return self.tensor.shape[1] - 1, self.tensor.shape[2] - 1

    @property
    def entries(self) -> List[BivPoly]:
        return [BivPoly(self.tensor[i], Backend.FLOAT) for i in range(self.dim)]

    def padded(self, n: int, m: int) -> "VecPoly":
        arr = np.zeros((self.dim, n + 1, m + 1), dtype=complex)
        a = min(n + 1, self.tensor.shape[1])
        b = min(m + 1, self.tensor.shape[2])
        arr[:, :a, :b] = self.tensor[:, :a, :b]
        return VecPoly(arr)

    def reflect(self, n: int, m: int) -> "VecPoly":
        """Поэлементное отражение при бистепени (n, m)"""
        return VecPoly(np.conj(self.padded(n, m).tensor[:, ::-1, ::-1]))

    def swap(self) -> "VecPoly":
        return VecPoly(np.transpose(self.tensor, (0, 2, 1)))

    def left(self, matrix: np.ndarray) -> "VecPoly":
        return VecPoly(np.einsum("ij,jab->iab", matrix, self.tensor))

    def matrix_z2(self) -> UniMatPoly:
        """E(z2)[i, j] = коэффициент при z1^j: E[k, i, j] = C[i, j, k]"""
        return UniMatPoly(np.transpose(self.tensor, (2, 0, 1)), "z2")

    def matrix_z1(self) -> UniMatPoly:
        """E(z1)[i, j] = коэффициент при z2^j: E[k, i, j] = C[i, k, j]"""
        return UniMatPoly(np.transpose(self.tensor, (1, 0, 2)), "z1")

    def eval_many(self, z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
        """Значения формы (dim, S) в точках (z1[s], z2[s])"""
        n, m = self.bidegree
        v1 = np.power.outer(np.asarray(z1, dtype=complex), np.arange(n + 1))
        v2 = np.power.outer(np.asarray(z2, dtype=complex), np.arange(m + 1))
        return np.einsum("ijk,sj,sk->is", self.tensor, v1, v2)

    def norm2_many(self, z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return np.zeros(np.shape(z1))
        return np.sum(np.abs(self.eval_many(z1, z2)) ** 2, axis=0)

    def kernel(self, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
        vec = self if shape is None else self.padded(shape[0] - 1, shape[1] - 1)
        return np.einsum("ijk,ilm->jklm", np.conj(vec.tensor), vec.tensor)

    def canonical(self, rel_tol: float = 1e-6) -> "VecPoly":
        """Представитель класса U·A: эшелонная форма с положительными ведущими элементами"""
        n1, n2 = self.tensor.shape[1:]
        rows = canonical_rows(self.kernel().reshape(n1 * n2, n1 * n2), self.dim, rel_tol)
        return VecPoly(rows.reshape(self.dim, n1, n2))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.tensor), initial=0.0))

    def to_dict(self) -> Dict[str, Any]:
        from .codec import format_poly
        return {
            "dim": self.dim,
            "bidegree": list(self.bidegree),
            "entries": [format_poly(p) for p in self.entries],
        }


# ===== ЯДРА =====

def poly_kernel(p: BivPoly, shape: Tuple[int, int]) -> np.ndarray:
    return VecPoly.from_polys([p], (shape[0] - 1, shape[1] - 1)).kernel()


def pad_kernel(kern: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    out = np.zeros((shape[0], shape[1], shape[0], shape[1]), dtype=complex)
    a, b = min(shape[0], kern.shape[0]), min(shape[1], kern.shape[1])
    out[:a, :b, :a, :b] = kern[:a, :b, :a, :b]
    return out


def shift_kernel(kern: np.ndarray, axis: int) -> np.ndarray:
    """Умножение на z_j conj(w_j): размер по оси j растёт на единицу"""
    n1, n2 = kern.shape[:2]
    if axis == 0:
        out = np.zeros((n1 + 1, n2, n1 + 1, n2), dtype=complex)
        out[1:, :, 1:, :] = kern
    else:
        out = np.zeros((n1, n2 + 1, n1, n2 + 1), dtype=complex)
        out[:, 1:, :, 1:] = kern
    return out


def one_minus(kern: np.ndarray, axis: int) -> np.ndarray:
    """(1 - z_j conj(w_j)) K"""
    shifted = shift_kernel(kern, axis)
    return pad_kernel(kern, shifted.shape[:2]) - shifted


def divide_kernel(kern: np.ndarray, axis: int) -> Tuple[np.ndarray, float]:
    """Q с (1 - z_j conj(w_j)) Q = K и невязка деления"""
    quot = np.array(kern, dtype=complex)
    term = np.array(kern, dtype=complex)
    size = kern.shape[axis]
    for _ in range(size):
        term = shift_kernel(term, axis)
        term = term[:kern.shape[0], :kern.shape[1], :kern.shape[0], :kern.shape[1]]
        quot = quot + term
    back = one_minus(quot, axis)
    residual = float(np.max(np.abs(back - pad_kernel(kern, back.shape[:2])), initial=0.0))
    return quot, residual


def kernel_to_matrix(kern: np.ndarray) -> np.ndarray:
    n1, n2 = kern.shape[:2]
    return kern.reshape(n1 * n2, n1 * n2)


def factor_kernel(kern: np.ndarray, rel_tol: float, max_rank: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Положительно полуопределённое ядро K = C^H C.

    Возвращает тензор C (r, n1, n2) по убыванию собственных значений и сами значения.
    """
    n1, n2 = kern.shape[:2]
    mat = kernel_to_matrix(kern)
    mat = 0.5 * (mat + mat.conj().T)
    vals, vecs = np.linalg.eigh(mat)
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    top = max(float(vals[0]) if vals.size else 0.0, 0.0)
    keep = vals > rel_tol * max(top, 1e-300) if top > 0 else np.zeros_like(vals, dtype=bool)
    if max_rank is not None:
        keep[max_rank:] = False
    chosen = vals[keep]
    rows = np.sqrt(chosen)[:, np.newaxis] * vecs[:, keep].conj().T
    return rows.reshape(len(chosen), n1, n2), vals


def canonical_rows(gram: np.ndarray, dim: int, rel_tol: float) -> np.ndarray:
    """
    Строки R c R^H R = gram: столбцовый Холецкий с пропуском вырожденных столбцов.

    Ведущие элементы строк вещественны и положительны; недостающие строки нулевые.
    """
    size = gram.shape[0]
    scale = max(float(np.max(np.abs(np.diag(gram)), initial=0.0)), 1e-300)
    rows: List[np.ndarray] = []
    for a in range(size):
        if len(rows) >= dim:
            break
        done = np.array(rows) if rows else np.zeros((0, size), dtype=complex)
        d = float(np.real(gram[a, a] - np.sum(np.abs(done[:, a]) ** 2)))
        if d <= rel_tol * scale:
            continue
        pivot = np.sqrt(d)
        row = np.zeros(size, dtype=complex)
        row[a] = pivot
        tail = gram[a, a + 1:] - np.conj(done[:, a]) @ done[:, a + 1:]
        row[a + 1:] = tail / pivot
        rows.append(row)
    out = np.zeros((dim, size), dtype=complex)
    if rows:
        out[:len(rows)] = np.array(rows)
    return out


def kernel_residual(kern: np.ndarray) -> float:
    return float(np.max(np.abs(kern), initial=0.0))
