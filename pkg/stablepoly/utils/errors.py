"""
Иерархия исключений пакета.

Библиотечный код только бросает исключения, коды выхода расставляет CLI.
"""


class StablePolyError(Exception):
    """Базовая ошибка пакета"""
    exit_code = 1

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict:
        payload = {"error": type(self).__name__, "message": self.message}
        if self.details:
            payload["details"] = {k: str(v) for k, v in self.details.items()}
        return payload


class InputFormatError(StablePolyError):
    """Некорректный JSON или формат полинома"""
    exit_code = 2


class ConfigError(StablePolyError):
    """Неизвестный или некорректный параметр конфигурации"""
    exit_code = 2


class BackendMismatchError(StablePolyError):
    """Смешение EXACT и FLOAT в одной операции"""
    exit_code = 3


class PreconditionError(StablePolyError):
    """Нарушено математическое предусловие операции"""
    exit_code = 3


class NumericalFailure(StablePolyError):
    """Численный сбой или расхождение независимых проверок"""
    exit_code = 4


class UnboundedError(PreconditionError):
    """Порядок числителя меньше порядка знаменателя: функция не ограничена"""
    exit_code = 3
