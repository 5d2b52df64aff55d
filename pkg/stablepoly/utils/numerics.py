"""
Общие численные помощники: кластеризация корней, сетки на торе, подгонка наклона.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

logger = logging.getLogger(__name__)


def cluster_points(points: Sequence[Sequence[complex]], tol: float) -> List[Tuple[np.ndarray, int]]:
    """
    Одиночная связь с порогом tol для точек в C^d.

    Возвращает (центроид, размер кластера) в порядке первого появления.
    """
    arr = np.asarray(points, dtype=complex)
    if arr.size == 0:
        return []
    if arr.ndim == 1:
        arr = arr[:, np.newaxis]
    if len(arr) == 1:
        return [(arr[0], 1)]
    real = np.concatenate([arr.real, arr.imag], axis=1)
    labels = fcluster(linkage(real, method="single"), t=tol, criterion="distance")
    order: List[int] = []
    for lab in labels:
        if lab not in order:
            order.append(lab)
    out = []
    for lab in order:
        members = arr[labels == lab]
        out.append((members.mean(axis=0), len(members)))
    return out


def cluster_roots(roots: Sequence[complex], tol: float) -> List[Tuple[complex, int]]:
    return [(complex(c[0]), k) for c, k in cluster_points(np.asarray(roots, dtype=complex), tol)]


def _groups(values: np.ndarray, tol: float) -> List[np.ndarray]:
    if len(values) == 1:
        return [values]
    real = np.stack([values.real, values.imag], axis=1)
    labels = fcluster(linkage(real, method="single"), t=tol, criterion="distance")
    order: List[int] = []
    for lab in labels:
        if lab not in order:
            order.append(lab)
    return [values[labels == lab] for lab in order]


def cluster_multiple(values: Sequence[complex], coarse: float, fine: float,
                     noise: float) -> List[Tuple[complex, int]]:
    """
    Кластеры кратных корней.

    Группа из k значений, собранная одиночной связью с порогом coarse, остаётся
    целой, только если её разброс не больше 10 noise^(1/k) (масштаб возмущения
    k-кратного корня). Иначе порог делится на 10, но не ниже fine.
    """
    arr = np.asarray(values, dtype=complex).ravel()
    out: List[Tuple[complex, int]] = []

    def visit(members: np.ndarray, tol: float) -> None:
        for group in _groups(members, tol):
            centre = complex(group.mean())
            k = len(group)
            spread = float(np.max(np.abs(group - centre)))
            bound = 10.0 * noise ** (1.0 / k) * max(1.0, abs(centre))
            if k == 1 or spread <= bound or tol <= fine:
                out.append((centre, k))
            else:
                visit(group, max(tol / 10.0, fine))

    if arr.size:
        visit(arr, coarse)
    return out


def trimmed_roots(coeffs_ascending: Sequence[complex], rel_tol: float = 0.0) -> np.ndarray:
    """Корни многочлена по возрастающим коэффициентам; нулевые старшие отбрасываются"""
    c = np.asarray(coeffs_ascending, dtype=complex)
    scale = np.max(np.abs(c), initial=0.0)
    if scale == 0.0:
        return np.array([], dtype=complex)
    nz = np.nonzero(np.abs(c) > rel_tol * scale)[0]
    c = c[:nz[-1] + 1]
    if len(c) <= 1:
        return np.array([], dtype=complex)
    return np.roots(c[::-1])


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Наклон прямой по методу наименьших квадратов"""
    if len(xs) < 2:
        return float("nan")
    slope, _ = np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), 1)
    return float(slope)


def random_torus(count: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    a = rng.uniform(0, 2 * np.pi, size=(2, count))
    return np.exp(1j * a[0]), np.exp(1j * a[1])


def random_bidisk(count: int, rng: np.random.Generator, radius: float = 0.999) -> Tuple[np.ndarray, np.ndarray]:
    r = radius * np.sqrt(rng.uniform(0, 1, size=(2, count)))
    a = rng.uniform(0, 2 * np.pi, size=(2, count))
    return r[0] * np.exp(1j * a[0]), r[1] * np.exp(1j * a[1])


def relative_change(old: float, new: float) -> float:
    base = max(abs(old), abs(new))
    if base == 0.0:
        return 0.0
    return abs(new - old) / base


def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)
