"""
Общие многочлены для тестов.

p0 = 2 - z1 - z2 - простейший полуустойчивый многочлен с нулём на торе.
"""
import json

import pytest

from stablepoly.config import Config
from stablepoly.core.bivpoly import BivPoly
from stablepoly.core.scalars import Backend

EX2_TEXT = (
    "((3*sqrt(5) - 2)*z2**2 - (6*sqrt(5) + 9)*z2 + 18)/18"
    " + (9*z2**2 - 14*z2 + 6*sqrt(5) - 9)*z1/18"
    " + (9*z2 - 3*sqrt(5) - 2)*z1**2/18"
)


@pytest.fixture
def cfg():
    return Config()


@pytest.fixture
def p0():
    return BivPoly.from_expr("2 - z1 - z2")


@pytest.fixture
def p4():
    """Устойчивый: нулей на замкнутом бидиске нет"""
    return BivPoly.from_expr("4 - z1 - z2")


@pytest.fixture
def ex1():
    return BivPoly.from_expr("4 - z1 - 3*z2 - z1*z2 + z2**2", (1, 2))


@pytest.fixture
def ex2():
    return BivPoly.from_expr(EX2_TEXT, (2, 2), Backend.FLOAT)


@pytest.fixture
def ex3():
    return BivPoly.from_expr("4 - 5*z1 - 2*z2 + 2*z1*z2 + 3*z1**2 - z1**2*z2 - z1**3*z2", (3, 1))


@pytest.fixture
def one_12():
    return BivPoly.constant(1, 1, 2)


@pytest.fixture
def goodman():
    """Числители q для q/p0"""
    return {
        "G1": BivPoly.from_expr("(1 - z1)**8 * (1 - z2)**8"),
        "G2": BivPoly.from_expr("(1 - z1)*(1 - z2)"),
        "G3": BivPoly.constant(2),
    }


@pytest.fixture
def poly_file(tmp_path):
    """Пишет многочлен в JSON и возвращает путь"""
    def write(p: BivPoly, name: str = "p.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(p.to_dict()), encoding="utf-8")
        return str(path)
    return write
