"""
Канонические системы Аглера и унитарные реализации p̃/p.

|p|² - |p̃|² = (1-|z1|²)|E1|² + (1-|z2|²)|F2|² = (1-|z1|²)|F1|² + (1-|z2|²)|E2|²,
|E1|² - |F1|² = (1-|z2|²)|G|²,  |E2|² - |F2|² = (1-|z1|²)|G|².

E1 берётся из факторизации Фейера-Рисса символа T1(z2), F2 - из
PSD-разложения ядра, остальное - отражениями.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space, orth

from ..config import config as default_config
from ..core.bivpoly import BivPoly
from ..core.matpoly import UniMatPoly, flip_matrix
from ..core.scalars import EXACT_ZERO, exact_conj, to_complex
from ..core.vecpoly import (
    VecPoly,
    divide_kernel,
    factor_kernel,
    kernel_to_matrix,
    one_minus,
    pad_kernel,
    poly_kernel,
)
from ..utils.errors import NumericalFailure, PreconditionError
from ..utils.numerics import make_rng, random_bidisk, random_torus
from .factorization import build_T1, fejer_riesz
from .stability import require_semistable

logger = logging.getLogger(__name__)

PairLike = Union[VecPoly, Sequence[BivPoly]]


@dataclass
class AglerSystem:
    p: BivPoly
    E1: VecPoly
    F1: VecPoly
    E2: VecPoly
    F2: VecPoly
    G: VecPoly
    identity_residual: float
    factor_residual: float = 0.0
    swapped: bool = False

    @property
    def bidegree(self) -> Tuple[int, int]:
        return self.p.bidegree

    @property
    def dim_G(self) -> int:
        return self.G.dim

    @property
    def unique_pair(self) -> bool:
        return self.G.dim == 0

    # Матричные формы: E1(z2), F1(z2) размера n x n и E2(z1), F2(z1) размера m x m
    @property
    def E1_matrix(self) -> UniMatPoly:
        return self.E1.matrix_z2()

    @property
    def F1_matrix(self) -> UniMatPoly:
        return self.F1.matrix_z2()

    @property
    def E2_matrix(self) -> UniMatPoly:
        return self.E2.matrix_z1()

    @property
    def F2_matrix(self) -> UniMatPoly:
        return self.F2.matrix_z1()

    def determinant_roots(self) -> Dict[str, np.ndarray]:
        out = {}
        for name in ("E1", "F1", "E2", "F2"):
            mat = getattr(self, f"{name}_matrix")
            out[name] = mat.det_roots() if mat.rows else np.array([], dtype=complex)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bidegree": list(self.bidegree),
            "E1": self.E1.to_dict(),
            "F1": self.F1.to_dict(),
            "E2": self.E2.to_dict(),
            "F2": self.F2.to_dict(),
            "G": self.G.to_dict(),
            "dim_G": self.dim_G,
            "unique_pair": self.unique_pair,
            "identity_residual": self.identity_residual,
            "factor_residual": self.factor_residual,
        }


@dataclass
class Realization:
    """U = [[A, B], [C, D]] с p̃/p = A + BΔ(I - DΔ)⁻¹C, Δ = diag(z1 I_N, z2 I_M)"""
    U: np.ndarray
    N: int
    M: int
    unitarity_residual: float = 0.0
    transfer_residual: float = 0.0
    points: List[Tuple[complex, complex]] = field(default_factory=list, repr=False)

    @property
    def A(self) -> complex:
        return complex(self.U[0, 0])

    @property
    def B(self) -> np.ndarray:
        return self.U[:1, 1:]

    @property
    def C(self) -> np.ndarray:
        return self.U[1:, :1]

    @property
    def D(self) -> np.ndarray:
        return self.U[1:, 1:]

    def transfer(self, z1: complex, z2: complex) -> complex:
        size = self.N + self.M
        if size == 0:
            return self.A
        delta = np.diag(np.concatenate([np.full(self.N, z1), np.full(self.M, z2)]).astype(complex))
        inner = np.linalg.solve(np.eye(size) - self.D @ delta, self.C)
        return complex(self.A + (self.B @ delta @ inner)[0, 0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "U": self.U,
            "N": self.N,
            "M": self.M,
            "unitarity_residual": self.unitarity_residual,
            "transfer_residual": self.transfer_residual,
        }


# ===== ТОЖДЕСТВО АГЛЕРА =====

def _as_vec(pair: PairLike) -> VecPoly:
    if isinstance(pair, VecPoly):
        return pair
    polys = list(pair)
    if not polys:
        return VecPoly.zero(0, 0, 0)
    return VecPoly.from_polys(polys)


def _common_shape(*shapes: Tuple[int, ...]) -> Tuple[int, int]:
    return max(s[0] for s in shapes), max(s[1] for s in shapes)


def _float_defect(p: BivPoly, A1: VecPoly, A2: VecPoly) -> np.ndarray:
    n, m = p.bidegree
    k1 = one_minus(A1.kernel(), 0)
    k2 = one_minus(A2.kernel(), 1)
    shape = _common_shape((n + 1, m + 1), k1.shape, k2.shape)
    return (poly_kernel(p, shape) - poly_kernel(p.reflect(), shape)
            - pad_kernel(k1, shape) - pad_kernel(k2, shape))


def _exact_kernel(polys: Sequence[BivPoly], sign: int, axis: Optional[int], out: Dict) -> None:
    """Добавляет sign * (1 - z_j conj(w_j))^[axis] Σ conj(a(w)) a(z) в словарь"""
    for poly in polys:
        terms = poly.terms()
        for a, ca in terms.items():
            for b, cb in terms.items():
                value = exact_conj(cb) * ca
                key = (b[0], b[1], a[0], a[1])
                out[key] = out.get(key, EXACT_ZERO) + value * sign
                if axis is not None:
                    shifted = list(key)
                    shifted[axis] += 1
                    shifted[axis + 2] += 1
                    shifted = tuple(shifted)
                    out[shifted] = out.get(shifted, EXACT_ZERO) - value * sign


def verify_agler(p: BivPoly, A1: PairLike, A2: PairLike) -> float:
    """
    Максимальный коэффициент поляризованного дефекта
    |p|² - |p̃|² - (1-|z1|²)|A1|² - (1-|z2|²)|A2|².

    Для точного p и точных списков многочленов ноль получается точно.
    """
    exact_route = (p.is_exact and not isinstance(A1, VecPoly) and not isinstance(A2, VecPoly)
                   and all(a.is_exact for a in list(A1) + list(A2)))
    if exact_route:
        defect: Dict = {}
        _exact_kernel([p], 1, None, defect)
        _exact_kernel([p.reflect()], -1, None, defect)
        _exact_kernel(list(A1), -1, 0, defect)
        _exact_kernel(list(A2), -1, 1, defect)
        nonzero = [abs(to_complex(v)) for v in defect.values() if v != EXACT_ZERO]
        return max(nonzero, default=0.0)
    vec1, vec2 = _as_vec(A1), _as_vec(A2)
    return float(np.max(np.abs(_float_defect(p.to_float(), vec1, vec2)), initial=0.0))


def _g_residual(E: VecPoly, F: VecPoly, G: VecPoly, axis: int) -> float:
    """|E|² - |F|² - (1-|z_axis|²)|G|²"""
    kg = one_minus(G.kernel(), axis)
    shape = _common_shape(E.tensor.shape[1:], F.tensor.shape[1:], kg.shape)
    diff = pad_kernel(E.kernel(), shape) - pad_kernel(F.kernel(), shape) - pad_kernel(kg, shape)
    return float(np.max(np.abs(diff), initial=0.0))


# ===== КАНОНИЧЕСКАЯ СИСТЕМА =====

def _psd_factor(kern: np.ndarray, tol: float, scale: float,
                max_rank: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """PSD-множитель ядра с абсолютным порогом tol * scale"""
    if float(np.max(np.abs(kern), initial=0.0)) <= tol * scale:
        n1, n2 = kern.shape[:2]
        return np.zeros((0, n1, n2), dtype=complex), np.zeros(0)
    mat = kernel_to_matrix(kern)
    mat_top = float(np.max(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))))
    rel = tol * scale / mat_top if mat_top > 0 else 1.0
    return factor_kernel(kern, rel, max_rank)


def _build_system(p: BivPoly, cfg) -> AglerSystem:
    """Основной путь при n <= m"""
    n, m = p.bidegree
    pf = p.to_float()
    scale = max(1.0, pf.norm() ** 2)

    # 1. E1 из Фейера-Рисса, F1 отражением
    T1 = build_T1(pf)
    E1mat = fejer_riesz(T1, cfg=cfg)
    E1 = VecPoly.from_matrix_z2(E1mat).padded(n - 1, m).canonical() if n else VecPoly.zero(0, -1, m)
    F1 = E1.reflect(n - 1, m)

    # 2. Ядро F2: ((|p|² - |p̃|²) - (1-|z1|²)|E1|²) / (1-|z2|²)
    shape = (n + 1, m + 1)
    gamma = (poly_kernel(pf, shape) - poly_kernel(pf.reflect(), shape)
             - pad_kernel(one_minus(E1.kernel((max(n, 1), m + 1)), 0), shape))
    quot, div_res = divide_kernel(gamma, 1)
    logger.debug(f"🔍 Невязка деления ядра F2: {div_res:.2e}")
    if div_res > cfg.FR_TOL * scale:
        raise NumericalFailure("Ядро F2 не делится на (1 - z2 w̄2)", residual=div_res)
    rows, vals = _psd_factor(quot, cfg.PSD_RANK_TOL, scale, max_rank=m)
    if vals.size > m and vals[m] > cfg.G_RANK_TOL * scale:
        raise NumericalFailure("Ранг ядра F2 больше m", eigenvalue=float(vals[m]), m=m)
    F2_tensor = np.zeros((m, n + 1, m), dtype=complex)
    F2_tensor[:rows.shape[0]] = rows[:, :, :m]
    F2 = VecPoly(F2_tensor).canonical() if m else VecPoly(F2_tensor)
    E2 = F2.reflect(n, m - 1)

    # 3. G из |E1|² - |F1|² = (1-|z2|²)|G|²
    if n and m:
        diff = E1.kernel() - F1.kernel()
        gq, _ = divide_kernel(diff, 1)
        g_rows, _ = _psd_factor(gq[:, :m, :, :m], cfg.G_RANK_TOL, scale, max_rank=n * m)
        G = VecPoly(g_rows).canonical() if g_rows.shape[0] else VecPoly.zero(0, n - 1, m - 1)
    else:
        G = VecPoly.zero(0, max(n - 1, 0), max(m - 1, 0))

    return AglerSystem(p=p, E1=E1, F1=F1, E2=E2, F2=F2, G=G, identity_residual=0.0,
                       factor_residual=0.0)


def _swap_back(p: BivPoly, swapped: AglerSystem) -> AglerSystem:
    return AglerSystem(
        p=p,
        E1=swapped.E2.swap(),
        F1=swapped.F2.swap(),
        E2=swapped.E1.swap(),
        F2=swapped.F1.swap(),
        G=swapped.G.swap(),
        identity_residual=0.0,
        swapped=True,
    )


def canonical_system(p: BivPoly, cfg=None, check: bool = True) -> AglerSystem:
    """
    Каноническая система (E1, F1, E2, F2, G) полуустойчивого p.

    Векторы определены с точностью до унитарного множителя слева и
    приводятся к эшелонной форме с положительными ведущими элементами.
    """
    cfg = cfg or default_config
    if check:
        require_semistable(p, cfg)
    n, m = p.bidegree
    if n > m:
        # Скалярный или меньший матричный символ по другой переменной
        system = _swap_back(p, _build_system(p.swap(), cfg))
    else:
        system = _build_system(p, cfg)

    residuals = [
        verify_agler(p, system.E1, system.F2),
        verify_agler(p, system.F1, system.E2),
    ]
    if n and m:
        residuals.append(_g_residual(system.E1, system.F1, system.G, 1))
        residuals.append(_g_residual(system.E2, system.F2, system.G, 0))
    system.identity_residual = max(residuals)
    system.factor_residual = residuals[0]
    scale = max(1.0, p.norm() ** 2)
    if check and system.identity_residual > cfg.FR_TOL * scale:
        logger.error(f"❌ Тождество Аглера не выполнено: невязка {system.identity_residual:.2e}")
        raise NumericalFailure("Невязка тождества Аглера выше допуска", residual=system.identity_residual)
    if system.identity_residual > cfg.AGLER_TOL * scale:
        logger.warning(f"⚠️ Невязка тождества Аглера {system.identity_residual:.2e}")
    logger.info(f"✅ Система Аглера: dim G = {system.dim_G}, "
                f"невязка {system.identity_residual:.2e}")
    return system


def alternate_pair(p: BivPoly, system: Optional[AglerSystem] = None, cfg=None) -> Tuple[VecPoly, VecPoly]:
    """Вторая пара Аглера (F1, E2)"""
    system = system or canonical_system(p, cfg)
    return system.F1, system.E2


def eont_residual(p: BivPoly, samples: int = 1000, system: Optional[AglerSystem] = None,
                  seed: Optional[int] = None, cfg=None) -> float:
    """
    На торе |E1|² = n|p|² - 2Re(p̄ z1 ∂1 p) и |E2|² = m|p|² - 2Re(p̄ z2 ∂2 p).

    Возвращает максимальное отклонение по случайным точкам тора.
    """
    cfg = cfg or default_config
    system = system or canonical_system(p, cfg)
    n, m = p.bidegree
    z1, z2 = random_torus(samples, make_rng(cfg.SEED if seed is None else seed))
    pv = p.eval(z1, z2)
    worst = 0.0
    for vec, deg, axis in ((system.E1, n, 0), (system.E2, m, 1)):
        dv = p.z_derivative(axis).eval(z1, z2)
        target = deg * np.abs(pv) ** 2 - 2 * np.real(np.conj(pv) * dv)
        worst = max(worst, float(np.max(np.abs(vec.norm2_many(z1, z2) - target))))
    return worst


# ===== РЕАЛИЗАЦИЯ =====

def intertwine(A: PairLike, B: PairLike, cfg=None) -> np.ndarray:
    """
    Изометрия V с V A(z) = B(z) при |A(z)|² = |B(z)|².

    На span{A(z)} V задаётся решением линейной системы на коэффициентах,
    на ортогональном дополнении - каноническим продолжением.
    """
    cfg = cfg or default_config
    A, B = _as_vec(A), _as_vec(B)
    shape = _common_shape(A.tensor.shape[1:], B.tensor.shape[1:])
    Ka, Kb = A.kernel(shape), B.kernel(shape)
    scale = max(1.0, float(np.max(np.abs(Ka), initial=0.0)))
    defect = float(np.max(np.abs(Ka - Kb), initial=0.0))
    if defect > cfg.AGLER_TOL * scale:
        raise PreconditionError("Нормы векторов не совпадают: |A|² ≠ |B|²", defect=defect)

    a_mat = A.padded(shape[0] - 1, shape[1] - 1).tensor.reshape(A.dim, -1)
    b_mat = B.padded(shape[0] - 1, shape[1] - 1).tensor.reshape(B.dim, -1)

    # 1. Частичная изометрия на образе
    u_a = orth(a_mat) if a_mat.size else np.zeros((A.dim, 0))
    partial = b_mat @ np.linalg.pinv(a_mat) if a_mat.size else np.zeros((B.dim, A.dim))
    u_b = partial @ u_a
    # 2. Продолжение на дополнение
    rest_a = null_space(u_a.conj().T) if u_a.shape[1] else np.eye(A.dim, dtype=complex)
    rest_b = null_space(u_b.conj().T) if u_b.shape[1] else np.eye(B.dim, dtype=complex)
    if rest_a.shape[1] > rest_b.shape[1]:
        raise PreconditionError("Недостаточно места для изометрического продолжения",
                                source=A.dim, target=B.dim)
    V = u_b @ u_a.conj().T + rest_b[:, :rest_a.shape[1]] @ rest_a.conj().T
    residual = float(np.max(np.abs(V @ a_mat - b_mat), initial=0.0))
    if residual > cfg.TRANSFER_TOL * scale:
        raise NumericalFailure("Изометрия не переводит A в B", residual=residual)
    return V


def _colligation_vectors(p: BivPoly, A1: VecPoly, A2: VecPoly) -> Tuple[VecPoly, VecPoly]:
    """(p, z1 A1, z2 A2) и (p̃, A1, A2) на общей бистепени"""
    n, m = p.bidegree
    a1, b1 = A1.bidegree
    a2, b2 = A2.bidegree
    n1 = max(n + 1, a1 + 2, a2 + 1)
    n2 = max(m + 1, b1 + 1, b2 + 2)
    N, M = A1.dim, A2.dim
    left = np.zeros((1 + N + M, n1, n2), dtype=complex)
    right = np.zeros_like(left)
    pc = p.float_coeffs
    left[0, :n + 1, :m + 1] = pc
    right[0, :n + 1, :m + 1] = p.reflect().float_coeffs
    left[1:1 + N, 1:a1 + 2, :b1 + 1] = A1.tensor
    right[1:1 + N, :a1 + 1, :b1 + 1] = A1.tensor
    left[1 + N:, :a2 + 1, 1:b2 + 2] = A2.tensor
    right[1 + N:, :a2 + 1, :b2 + 1] = A2.tensor
    return VecPoly(left), VecPoly(right)


def realize(p: BivPoly, A1: PairLike, A2: PairLike, cfg=None) -> Realization:
    """Унитарная реализация p̃/p по паре Аглера"""
    cfg = cfg or default_config
    A1, A2 = _as_vec(A1), _as_vec(A2)
    left, right = _colligation_vectors(p, A1, A2)
    U = intertwine(left, right, cfg)
    size = U.shape[0]
    unitarity = float(np.max(np.abs(U.conj().T @ U - np.eye(size)), initial=0.0))
    real = Realization(U=U, N=A1.dim, M=A2.dim, unitarity_residual=unitarity)

    z1, z2 = random_bidisk(cfg.TRANSFER_POINTS, make_rng(cfg.SEED))
    target = p.reflect().eval(z1, z2) / p.eval(z1, z2)
    values = np.array([real.transfer(a, b) for a, b in zip(z1, z2)])
    real.transfer_residual = float(np.max(np.abs(values - target)))
    real.points = list(zip(z1.tolist(), z2.tolist()))

    if unitarity > cfg.UNITARY_TOL:
        logger.warning(f"⚠️ U не унитарна: {unitarity:.2e}")
    if real.transfer_residual > cfg.TRANSFER_TOL:
        logger.error(f"❌ Передаточная функция расходится с p̃/p: {real.transfer_residual:.2e}")
        raise NumericalFailure("Передаточная функция не совпадает с p̃/p",
                               residual=real.transfer_residual)
    logger.info(f"✅ Реализация {size}x{size}, невязка {real.transfer_residual:.2e}")
    return real


def matrix_reflection_defect(system: AglerSystem) -> float:
    """E1(z2) = z2^m conj(F1(1/z̄2)) X_n покоэффициентно"""
    n, m = system.bidegree
    if not n:
        return 0.0
    rebuilt = system.F1_matrix.reflection(m).right(flip_matrix(n))
    return float(np.max(np.abs(rebuilt.coeffs - system.E1_matrix.padded(m).coeffs), initial=0.0))
