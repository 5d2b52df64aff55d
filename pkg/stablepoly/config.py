from dataclasses import dataclass, fields, replace, asdict
from typing import Any, Dict, Tuple
import json
import os
from dotenv import load_dotenv

from .utils.errors import ConfigError

load_dotenv()


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


@dataclass(frozen=True)
class Config:
    # Общие параметры запуска
    SEED: int = _env_int("STABLEPOLY_SEED", 20240601)
    LOG_LEVEL: str = os.getenv("STABLEPOLY_LOG_LEVEL", "WARNING")
    LOG_FILE: str = os.getenv("STABLEPOLY_LOG_FILE", "")
    # Архив прогонов (SQLite по умолчанию)
    DB_URL: str = os.getenv("STABLEPOLY_DB_URL", "sqlite:///./stablepoly_runs.db")

    # Допуски ядра
    TORUS_TOL: float = 1e-12
    REGION_TOL: float = 1e-8
    DEDUP_TOL: float = 1e-6
    ROOT_CLUSTER_TOL: float = 1e-2
    EIGEN_CLUSTER_TOL: float = 1e-7
    FLOAT_CLUSTER_RADIUS: float = 2e-2
    # Уровень шума для разделения кластеров: k-кратный корень расходится на ~noise^(1/k)
    ROOT_NOISE: float = 1e-10
    EIGEN_NOISE: float = 1e-12
    HOMOG_DIVIDE_TOL: float = 1e-9
    ORDER_TOL: float = 1e-10
    ZERO_RESIDUAL_TOL: float = 1e-6
    SNAP_DENOMINATOR: int = 64

    # Фейер-Рисс и системы Аглера
    FR_TOL: float = _env_float("STABLEPOLY_FR_TOL", 1e-6)
    FR_LADDER: Tuple[float, ...] = (1e-4, 1e-6, 1e-8)
    FR_SAMPLES: int = 1024
    PSD_RANK_TOL: float = 1e-9
    G_RANK_TOL: float = 1e-6
    AGLER_TOL: float = 1e-8
    UNITARY_TOL: float = 1e-9
    TRANSFER_TOL: float = 1e-8
    TRANSFER_POINTS: int = 100

    # Проверка полуустойчивости
    STABILITY_RADII: int = 64
    STABILITY_ANGLES: int = 512
    STABILITY_COLLAR: float = 1e-6

    # Модель Грама
    GRAM_GRID: int = 256
    GRAM_MAX_GRID: int = 4096
    GRAM_TOL: float = 1e-9

    # Идеал и принадлежность
    MEMBERSHIP_BASE_GRID: int = 64
    MEMBERSHIP_DOUBLINGS: int = 4
    MEMBERSHIP_GROWTH: float = 0.05
    RATIONAL_DENOMINATOR: int = 1000
    RATIONAL_TOL: float = 1e-8

    # Оракулы
    L2_BASE_GRID: int = 128
    L2_MAX_GRID: int = 2048
    L2_REFINE: int = 16
    L2_CONVERGENCE: float = 0.01
    DIVERGENCE_SLOPE: float = 0.1
    PLATEAU_TOL: float = 0.05
    SHEAR_RADIUS: int = 7
    SHEAR_RETRIES: int = 5
    FULTON_BUDGET: int = 2000

    # Граничный анализ
    BOTTOM_SAMPLES: int = 10_000
    RAY_COUNT: int = 20
    RAY_EXPONENTS: Tuple[int, ...] = tuple(range(4, 13))

    def with_overrides(self, overrides: Dict[str, Any]) -> "Config":
        """Новая конфигурация с заменёнными полями"""
        known = {f.name: f for f in fields(self)}
        clean = {}
        for key, value in overrides.items():
            name = key.upper()
            if name not in known:
                raise ConfigError(f"Неизвестный параметр конфигурации: {key}")
            current = getattr(self, name)
            try:
                if isinstance(current, tuple):
                    clean[name] = tuple(type(current[0])(v) for v in value) if current else tuple(value)
                else:
                    clean[name] = type(current)(value)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"Некорректное значение {key}={value!r}: {e}")
        return replace(self, **clean)

    def echo(self) -> Dict[str, Any]:
        """Эффективные значения для вывода в отчёт"""
        data = asdict(self)
        data.pop("DB_URL", None)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in data.items()}


def load_config(path: str, base: "Config" = None) -> Config:
    """Читает JSON-файл с переопределениями допусков"""
    base = base or config
    try:
        with open(path, encoding="utf-8") as fh:
            overrides = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Не удалось прочитать конфигурацию {path}: {e}")
    if not isinstance(overrides, dict):
        raise ConfigError("Файл конфигурации должен содержать JSON-объект")
    return base.with_overrides(overrides)


config = Config()
