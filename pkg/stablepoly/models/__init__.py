from .schemas import AnalysisRun, Base

__all__ = ["AnalysisRun", "Base"]
