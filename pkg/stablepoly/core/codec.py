"""
JSON-формат многочленов и человекочитаемая печать.

Формат: {"bidegree": [n, m], "backend": "exact"|"float",
"coeffs": [[[re, im], ...], ...]}, строки по степеням z1.
"""
import json
import math
from dataclasses import is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from ..utils.errors import InputFormatError
from .scalars import (
    Backend,
    GaussianRational,
    exact,
    exact_parts,
    format_exact,
    parse_scalar,
    to_complex,
)

FLOAT_ZERO = 1e-14


def poly_from_dict(data: Dict[str, Any]):
    from .bivpoly import BivPoly

    if not isinstance(data, dict):
        raise InputFormatError("Многочлен должен быть JSON-объектом")
    try:
        n, m = (int(v) for v in data["bidegree"])
        backend = Backend(data.get("backend", "exact"))
        rows = data["coeffs"]
    except KeyError as e:
        raise InputFormatError(f"Отсутствует поле {e}")
    except (TypeError, ValueError) as e:
        raise InputFormatError(f"Некорректный заголовок многочлена: {e}")
    if n < 0 or m < 0:
        raise InputFormatError("Бистепень должна быть неотрицательной")
    if not isinstance(rows, list) or len(rows) != n + 1:
        raise InputFormatError(f"Ожидалось {n + 1} строк коэффициентов")
    grid = np.empty((n + 1, m + 1), dtype=object)
    for j, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != m + 1:
            raise InputFormatError(f"Строка {j}: ожидалось {m + 1} коэффициентов")
        for k, entry in enumerate(row):
            grid[j, k] = parse_scalar(entry, backend)
    return BivPoly(grid, backend)


def poly_to_dict(p) -> Dict[str, Any]:
    n, m = p.bidegree
    rows = []
    for j in range(n + 1):
        if p.is_exact:
            rows.append([format_exact(p.coeffs[j, k]) for k in range(m + 1)])
        else:
            rows.append([[float(p.coeffs[j, k].real), float(p.coeffs[j, k].imag)] for k in range(m + 1)])
    return {"bidegree": [n, m], "backend": p.backend.value, "coeffs": rows}


def load_poly(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise InputFormatError(f"Не удалось открыть {path}: {e}")
    except json.JSONDecodeError as e:
        raise InputFormatError(f"Некорректный JSON в {path}: {e}")
    return poly_from_dict(data)


def parse_gaussian(text: str) -> GaussianRational:
    """Разбор "3/5+4/5i", "-1", "i", "1-2i" в гауссово рациональное"""
    s = text.strip().replace(" ", "").replace("j", "i").replace("I", "i")
    if not s:
        raise InputFormatError("Пустая координата")
    try:
        if s.endswith("i"):
            cut = max(s.rfind("+", 1), s.rfind("-", 1))
            if cut > 0 and s[cut - 1] not in "/eE":
                re_part, im_part = s[:cut], s[cut:-1]
            else:
                re_part, im_part = "0", s[:-1]
            if im_part in ("", "+"):
                im_part = "1"
            elif im_part == "-":
                im_part = "-1"
            return exact(Fraction(re_part), Fraction(im_part))
        return exact(Fraction(s), 0)
    except (ValueError, ZeroDivisionError):
        raise InputFormatError(f"Не удалось разобрать координату {text!r}")


def parse_point(text: str) -> Tuple[GaussianRational, ...]:
    parts = [part for part in text.split(",") if part.strip()]
    if len(parts) < 2:
        raise InputFormatError(f"Точка должна иметь не меньше двух координат: {text!r}")
    return tuple(parse_gaussian(part) for part in parts)


# ===== ПЕЧАТЬ =====

def format_scalar(value: Any, digits: int = 12) -> str:
    if isinstance(value, GaussianRational):
        re_part, im_part = exact_parts(value)
        if im_part == 0:
            return str(re_part)
        if re_part == 0:
            return f"{im_part}*I"
        sign = "+" if im_part > 0 else "-"
        return f"({re_part} {sign} {abs(im_part)}*I)"
    z = to_complex(value)
    if abs(z.imag) <= FLOAT_ZERO * max(1.0, abs(z)):
        return f"{z.real:.{digits}g}"
    if abs(z.real) <= FLOAT_ZERO * max(1.0, abs(z)):
        return f"{z.imag:.{digits}g}*I"
    sign = "+" if z.imag > 0 else "-"
    return f"({z.real:.{digits}g} {sign} {abs(z.imag):.{digits}g}*I)"


def _monomial(exps: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for e, name in zip(exps, names):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_terms(terms: Dict[Tuple[int, ...], Any], names: Sequence[str]) -> str:
    pieces = []
    for exps in sorted(terms, key=lambda e: (sum(e), tuple(-x for x in e))):
        coeff = format_scalar(terms[exps])
        if coeff in ("0", "-0"):
            continue
        mono = _monomial(exps, names)
        negative = coeff.startswith("-")
        magnitude = coeff[1:] if negative else coeff
        if mono:
            body = mono if magnitude == "1" else f"{magnitude}*{mono}"
        else:
            body = magnitude
        pieces.append(("-" if negative else "+", body))
    if not pieces:
        return "0"
    sign, body = pieces[0]
    text = f"-{body}" if sign == "-" else body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def format_poly(p, names: Sequence[str] = ("z1", "z2")) -> str:
    return format_terms(p.terms(), names)


# ===== ОТЧЁТЫ =====

def jsonable(obj: Any) -> Any:
    """Приводит отчёты к чистому JSON"""
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if is_dataclass(obj):
        return {k: jsonable(v) for k, v in vars(obj).items()}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()] if obj.dtype != object else [jsonable(v) for v in obj]
    if isinstance(obj, GaussianRational):
        return format_exact(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), ensure_ascii=False, indent=2, sort_keys=True)
