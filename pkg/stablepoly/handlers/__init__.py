from .commands import HANDLERS, build_parser

__all__ = ["HANDLERS", "build_parser"]
