"""
Матричная факторизация Фейера-Рисса T(z) = E(z)* E(z) на окружности.

Скалярный случай решается разбиением корней. В матричном случае нули
det T на окружности сначала выделяются элементарными множителями, а
регулярный остаток раскладывается через дискретное уравнение Риккати.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import cholesky, eigh, solve_discrete_are, solve_triangular

from ..config import config as default_config
from ..core.bivpoly import BivPoly
from ..core.matpoly import LaurentMat, UniMatPoly, unit_circle
from ..utils.errors import NumericalFailure, PreconditionError
from ..utils.numerics import cluster_roots, trimmed_roots

logger = logging.getLogger(__name__)


def build_T1(p: BivPoly) -> LaurentMat:
    """
    T1(z2) = R(z2)* R(z2) - S(z2)* S(z2).

    R[r, c] = p_{c-r}(z2), S[r, c] = p̃_{c-r}(z2) при c >= r, где p_j и p̃_j -
    коэффициенты p и его отражения при z1^j.
    """
    n, m = p.bidegree
    c = p.float_coeffs
    R = np.zeros((m + 1, n, n), dtype=complex)
    S = np.zeros((m + 1, n, n), dtype=complex)
    for r in range(n):
        for col in range(r, n):
            j = col - r
            for k in range(m + 1):
                R[k, r, col] = c[j, k]
                S[k, r, col] = np.conj(c[n - j, m - k])
    if n == 0:
        return LaurentMat(np.zeros((2 * m + 1, 0, 0), dtype=complex))
    rr = UniMatPoly(R, "z2").hermitian_square()
    ss = UniMatPoly(S, "z2").hermitian_square()
    return rr - ss


# ===== СКАЛЯРНЫЙ СЛУЧАЙ =====

def _torus_like(center: complex, members: np.ndarray, tol: float) -> bool:
    mods = np.abs(members)
    return abs(abs(center) - 1.0) <= tol or (np.any(mods < 1.0) and np.any(mods > 1.0))


def _scalar_factor(T: LaurentMat, cfg) -> np.ndarray:
    """Коэффициенты e(z) с |e|^2 = t на окружности и без нулей в D"""
    t = T.scalar_laurent()
    d = T.degree
    scale = np.max(np.abs(t), initial=0.0)
    if scale == 0.0:
        return np.zeros(d + 1, dtype=complex)
    roots = trimmed_roots(t, 1e-13)
    chosen: List[complex] = []
    for center, k in cluster_roots(roots, cfg.ROOT_CLUSTER_TOL):
        members = roots[np.abs(roots - center) <= cfg.ROOT_CLUSTER_TOL * k]
        if _torus_like(center, members, 1e-6):
            if k % 2:
                logger.warning(f"⚠️ Нечётная кратность корня {center:.6g} на окружности")
            chosen.extend([center / abs(center)] * (k // 2))
        else:
            chosen.extend(members[np.abs(members) > 1.0].tolist())
    monic = np.poly(chosen)[::-1] if chosen else np.array([1.0 + 0j])
    zs = unit_circle(256, 0.5)
    w = np.abs(np.polyval(monic[::-1], zs)) ** 2
    values = np.real(T.eval_many(zs)[:, 0, 0])
    k2 = float(np.sum(values * w) / np.sum(w * w))
    if k2 < -cfg.FR_TOL * scale:
        raise PreconditionError("Скалярный символ отрицателен на окружности")
    e = np.zeros(d + 1, dtype=complex)
    e[:len(monic)] = np.sqrt(max(k2, 0.0)) * monic[:d + 1]
    return e


# ===== МАТРИЧНЫЙ СЛУЧАЙ =====

def _det_laurent_roots(T: LaurentMat) -> np.ndarray:
    """Корни z^(N d) det T(z)"""
    top = 2 * T.size * T.degree
    count = 1 << max(int(np.ceil(np.log2(top + 1))), 3)
    zs = unit_circle(count)
    values = np.linalg.det(T.eval_many(zs)) * zs ** (T.size * T.degree)
    coeffs = np.fft.fft(values) / count
    return trimmed_roots(coeffs[:top + 1], 1e-12)


def _torus_root(T: LaurentMat, cfg) -> Optional[complex]:
    roots = _det_laurent_roots(T)
    for center, k in cluster_roots(roots, cfg.ROOT_CLUSTER_TOL):
        members = roots[np.abs(roots - center) <= cfg.ROOT_CLUSTER_TOL * k]
        if _torus_like(center, members, 1e-6):
            return center / abs(center)
    return None


def _extract(T: LaurentMat, alpha: complex) -> Tuple[LaurentMat, UniMatPoly]:
    """T = B* T' B с B(z) = I + (z - α - 1) v v*, где T(α) v = 0"""
    N, d = T.size, T.degree
    _, vecs = eigh(0.5 * (T.eval(alpha) + T.eval(alpha).conj().T))
    v = vecs[:, 0]
    P = np.outer(v, v.conj())
    eye = np.eye(N, dtype=complex)
    count = 1 << max(int(np.ceil(np.log2(8 * (d + 1)))), 6)
    zs = unit_circle(count, 0.5)
    values = T.eval_many(zs)
    binv = eye[np.newaxis] + (1.0 / (zs - alpha) - 1.0)[:, np.newaxis, np.newaxis] * P
    binv_h = eye[np.newaxis] + (zs / (1.0 - np.conj(alpha) * zs) - 1.0)[:, np.newaxis, np.newaxis] * P
    reduced = LaurentMat.from_samples(zs, binv_h @ values @ binv, d)
    B = UniMatPoly(np.array([eye - (1.0 + alpha) * P, P]))
    return reduced, B


def _riccati_factor(T: LaurentMat) -> UniMatPoly:
    """Внешний множитель регулярного символа через стабилизирующее решение DARE"""
    N, d = T.size, T.degree
    T0 = 0.5 * (T.lag(0) + T.lag(0).conj().T)
    if d == 0:
        L = cholesky(T0, lower=True)
        return UniMatPoly(L.conj().T[np.newaxis])
    size = N * d
    A = np.zeros((size, size), dtype=complex)
    for k in range(d - 1):
        A[(k + 1) * N:(k + 2) * N, k * N:(k + 1) * N] = np.eye(N)
    B = np.zeros((size, N), dtype=complex)
    B[:N] = np.eye(N)
    t = np.concatenate([T.lag(l) for l in range(1, d + 1)], axis=1)
    X = solve_discrete_are(A, B, np.zeros((size, size), dtype=complex), T0, s=t.conj().T)
    gamma = T0 + X[:N, :N]
    gamma = 0.5 * (gamma + gamma.conj().T)
    L = cholesky(gamma, lower=True)
    tail = solve_triangular(L, B.conj().T @ X @ A + t, lower=True)
    coeffs = np.zeros((d + 1, N, N), dtype=complex)
    coeffs[0] = L.conj().T
    for k in range(d):
        coeffs[k + 1] = tail[:, k * N:(k + 1) * N]
    return UniMatPoly(coeffs)


def factor_residual(T: LaurentMat, E: UniMatPoly, samples: int) -> float:
    zs = unit_circle(samples, 0.25)
    ev = E.eval_many(zs)
    diff = T.eval_many(zs) - np.conj(np.swapaxes(ev, 1, 2)) @ ev
    scale = max(1.0, float(np.max(np.abs(T.coeffs), initial=0.0)))
    return float(np.max(np.abs(diff), initial=0.0)) / scale


def _regular_factor(T: LaurentMat, cfg) -> UniMatPoly:
    """DARE, при неудаче - лестница регуляризаций T + εI с экстраполяцией"""
    try:
        return _riccati_factor(T)
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.debug(f"🔍 DARE без регуляризации не сошлось: {e}")
    eye = np.zeros_like(T.coeffs)
    eye[T.degree] = np.eye(T.size)
    candidates = []
    previous = None
    for eps in cfg.FR_LADDER:
        try:
            E = _riccati_factor(LaurentMat(T.coeffs + eps * eye))
        except (np.linalg.LinAlgError, ValueError) as e:
            logger.debug(f"🔍 ε={eps:g}: {e}")
            continue
        candidates.append(E)
        if previous is not None:
            prev_eps, prev_E = previous
            weight = eps / (prev_eps - eps)
            candidates.append(UniMatPoly(E.coeffs + weight * (E.coeffs - prev_E.coeffs)))
        previous = (eps, E)
    if not candidates:
        raise NumericalFailure("Лестница регуляризаций не дала факторизации")
    return min(candidates, key=lambda E: factor_residual(T, E, cfg.FR_SAMPLES))


def fejer_riesz(T: LaurentMat, tol: Optional[float] = None, cfg=None) -> UniMatPoly:
    """
    E с T = E* E на окружности и det E без нулей в D.

    E единственен с точностью до постоянного унитарного множителя слева.
    """
    cfg = cfg or default_config
    tol = cfg.FR_TOL if tol is None else tol
    N, d = T.size, T.degree
    if N == 0:
        return UniMatPoly(np.zeros((d + 1, 0, 0), dtype=complex))
    scale = max(1.0, float(np.max(np.abs(T.coeffs))))
    if T.hermitian_defect() > tol * scale:
        raise PreconditionError("Символ не эрмитов на окружности", defect=T.hermitian_defect())
    if T.min_eigenvalue(cfg.FR_SAMPLES) < -tol * scale:
        raise PreconditionError("Символ не положительно полуопределён на окружности",
                                min_eig=T.min_eigenvalue(cfg.FR_SAMPLES))

    if N == 1:
        E = UniMatPoly(_scalar_factor(T, cfg)[:, np.newaxis, np.newaxis])
    else:
        # 1. Выделяем нули det T на окружности
        factors: List[UniMatPoly] = []
        current = T
        for _ in range(N * d):
            alpha = _torus_root(current, cfg)
            if alpha is None:
                break
            current, B = _extract(current, alpha)
            factors.append(B)
            logger.debug(f"🔍 Выделен нуль det T в точке {alpha:.6g}")
        # 2. Регулярный остаток
        E = _regular_factor(current, cfg)
        for B in reversed(factors):
            E = E @ B
        E = E.padded(d)

    residual = factor_residual(T, E, cfg.FR_SAMPLES)
    if residual > tol:
        logger.error(f"❌ Невязка факторизации {residual:.3g} больше допуска {tol:.3g}")
        raise NumericalFailure("Факторизация Фейера-Рисса не достигла допуска",
                               residual=residual, tol=tol)
    roots = E.det_roots()
    inside = roots[np.abs(roots) < 1.0 - 1e-6] if roots.size else roots
    if inside.size:
        raise NumericalFailure("det E имеет нули в единичном круге", roots=inside.tolist())
    logger.info(f"✅ Факторизация {N}x{N} степени {d}, невязка {residual:.2e}")
    return E
