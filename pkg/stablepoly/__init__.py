"""
Устойчивые многочлены от двух переменных: разложения Аглера, кратности
пересечения, идеал I_p и граничная регулярность p̃/p.
"""
from .config import Config, config, load_config
from .core.bivpoly import BivPoly
from .core.scalars import Backend

__version__ = "1.0.0"

__all__ = ["BivPoly", "Backend", "Config", "config", "load_config", "__version__"]
