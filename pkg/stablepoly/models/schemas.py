from sqlalchemy import Column, Integer, String, DateTime, JSON, Index
from sqlalchemy.orm import declarative_base
from datetime import datetime

Base = declarative_base()


class AnalysisRun(Base):
    """Один запуск команды CLI"""
    __tablename__ = "analysis_runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    created_at = Column(DateTime, default=datetime.utcnow)
    command = Column(String(32))
    input_hash = Column(String(64))  # sha256 канонического JSON входа
    seed = Column(Integer, nullable=True)
    status = Column(String(8))  # PASS / FAIL / ERROR
    exit_code = Column(Integer, default=0)
    report = Column(JSON, default=dict)
    config_echo = Column(JSON, default=dict)

    __table_args__ = (
        Index("ix_runs_lookup", "input_hash", "command", "seed"),
        {"sqlite_autoincrement": True},
    )

    def summary(self) -> dict:
        return {
            "id": self.id,
            "created_at": self.created_at.isoformat() if self.created_at else None,
            "command": self.command,
            "input_hash": self.input_hash,
            "seed": self.seed,
            "status": self.status,
            "exit_code": self.exit_code,
        }
