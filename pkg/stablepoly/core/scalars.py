"""
Скаляры двух бэкендов.

EXACT: элементы гауссовых рациональных чисел QQ_I из sympy.
FLOAT: complex128 из numpy.
"""
from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Tuple, Union

import numpy as np
from sympy import QQ, QQ_I

from ..utils.errors import BackendMismatchError, InputFormatError


class Backend(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


GaussianRational = type(QQ_I.one)
Complexish = Union[GaussianRational, complex]

EXACT_ZERO = QQ_I.zero
EXACT_ONE = QQ_I.one


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputFormatError(f"Булево значение вместо числа: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputFormatError(f"Не удалось разобрать рациональное число: {value!r}")
    if isinstance(value, float):
        # Точное двоичное значение float
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise InputFormatError(f"Неподдерживаемый тип коэффициента: {type(value).__name__}")


def exact(re: Any = 0, im: Any = 0) -> GaussianRational:
    """Гауссово рациональное число re + i*im"""
    a, b = _to_fraction(re), _to_fraction(im)
    return QQ_I(QQ(a.numerator, a.denominator), QQ(b.numerator, b.denominator))


def exact_from_complex(value: complex) -> GaussianRational:
    """Точное двоичное представление комплексного float"""
    value = complex(value)
    return exact(Fraction(value.real), Fraction(value.imag))


def exact_parts(value: GaussianRational) -> Tuple[Fraction, Fraction]:
    return _to_fraction(value.x), _to_fraction(value.y)


def exact_conj(value: GaussianRational) -> GaussianRational:
    return QQ_I(value.x, -value.y)


def exact_abs2(value: GaussianRational) -> Fraction:
    re, im = exact_parts(value)
    return re * re + im * im


def to_complex(value: Any) -> complex:
    if isinstance(value, GaussianRational):
        return complex(float(value.x), float(value.y))
    return complex(value)


def is_exact(value: Any) -> bool:
    return isinstance(value, GaussianRational)


def snap_rational(value: complex, max_denominator: int, tol: float) -> Optional[GaussianRational]:
    """Ближайшее гауссово рациональное с ограниченным знаменателем, если оно в пределах tol"""
    value = complex(value)
    re = Fraction(value.real).limit_denominator(max_denominator)
    im = Fraction(value.imag).limit_denominator(max_denominator)
    if abs(complex(float(re), float(im)) - value) <= tol:
        return exact(re, im)
    return None


def format_exact(value: GaussianRational) -> list:
    """Пара строк "a/b" для JSON"""
    re, im = exact_parts(value)
    return [str(re), str(im)]


def zeros(shape, backend: Backend) -> np.ndarray:
    if backend is Backend.EXACT:
        out = np.empty(shape, dtype=object)
        out.fill(EXACT_ZERO)
        return out
    return np.zeros(shape, dtype=complex)


def conj_array(values: np.ndarray) -> np.ndarray:
    if values.dtype == object:
        out = np.empty(values.shape, dtype=object)
        flat_in, flat_out = values.ravel(), out.ravel()
        for i, v in enumerate(flat_in):
            flat_out[i] = exact_conj(v)
        return out
    return np.conj(values)


def to_float_array(values: np.ndarray) -> np.ndarray:
    if values.dtype == object:
        return np.vectorize(to_complex, otypes=[complex])(values) if values.size else np.zeros(values.shape, dtype=complex)
    return np.asarray(values, dtype=complex)


def to_exact_array(values: np.ndarray) -> np.ndarray:
    if values.dtype == object:
        return values
    out = np.empty(values.shape, dtype=object)
    flat_in, flat_out = values.ravel(), out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = exact_from_complex(v)
    return out


def array_is_zero(values: np.ndarray, tol: float = 0.0) -> bool:
    if values.dtype == object:
        return all(v == EXACT_ZERO for v in values.ravel())
    return not values.size or float(np.max(np.abs(values))) <= tol


def max_abs(values: np.ndarray) -> float:
    if not values.size:
        return 0.0
    if values.dtype == object:
        return max(abs(to_complex(v)) for v in values.ravel())
    return float(np.max(np.abs(values)))


def require_same_backend(*backends: Backend) -> Backend:
    unique = set(backends)
    if len(unique) > 1:
        raise BackendMismatchError("Смешанные бэкенды EXACT и FLOAT не допускаются")
    return backends[0]


def parse_scalar(entry: Any, backend: Backend) -> Complexish:
    """Разбор коэффициента из JSON: [re, im] или одиночное число"""
    if isinstance(entry, (list, tuple)):
        if len(entry) != 2:
            raise InputFormatError(f"Коэффициент должен быть парой [re, im]: {entry!r}")
        re, im = entry
    else:
        re, im = entry, 0
    if backend is Backend.EXACT:
        if isinstance(re, float) or isinstance(im, float):
            raise InputFormatError("EXACT-коэффициенты задаются целыми числами или строками \"a/b\"")
        return exact(re, im)
    try:
        return complex(float(Fraction(re) if isinstance(re, str) else re),
                       float(Fraction(im) if isinstance(im, str) else im))
    except (TypeError, ValueError) as e:
        raise InputFormatError(f"Некорректный FLOAT-коэффициент {entry!r}: {e}")
