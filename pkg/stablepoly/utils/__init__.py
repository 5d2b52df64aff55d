from .errors import (
    StablePolyError,
    InputFormatError,
    ConfigError,
    BackendMismatchError,
    PreconditionError,
    NumericalFailure,
    UnboundedError,
)

__all__ = [
    "StablePolyError",
    "InputFormatError",
    "ConfigError",
    "BackendMismatchError",
    "PreconditionError",
    "NumericalFailure",
    "UnboundedError",
]
