import hashlib
import json
import logging
from typing import Any, Dict, List, Optional

from sqlalchemy import create_engine, select
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import sessionmaker

from .config import config
from .models.schemas import AnalysisRun, Base
from .utils.errors import StablePolyError

logger = logging.getLogger(__name__)


def input_hash(payload: Any) -> str:
    """sha256 канонического JSON входа"""
    text = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class Database:
    """Архив прогонов анализа"""

    def __init__(self, url: Optional[str] = None):
        self.url = url or config.DB_URL
        try:
            self.engine = create_engine(self.url, future=True)
            self.session = sessionmaker(self.engine, expire_on_commit=False)
        except SQLAlchemyError as e:
            logger.error(f"❌ Не удалось подключиться к архиву {self.url}: {e}")
            raise StablePolyError(f"Архив недоступен: {e}")

    def create_tables(self) -> None:
        try:
            Base.metadata.create_all(self.engine)
            logger.info("✅ Таблицы архива созданы/проверены")
        except SQLAlchemyError as e:
            logger.error(f"❌ Ошибка создания таблиц архива: {e}")
            raise StablePolyError(f"Не удалось создать таблицы: {e}")

    def save_run(self, command: str, input_payload: Any, seed: Optional[int], status: str,
                 exit_code: int, report: Dict[str, Any], config_echo: Dict[str, Any]) -> int:
        """Сохраняет прогон и возвращает его id"""
        run = AnalysisRun(
            command=command,
            input_hash=input_hash(input_payload),
            seed=seed,
            status=status,
            exit_code=exit_code,
            report=report,
            config_echo=config_echo,
        )
        try:
            with self.session() as session:
                session.add(run)
                session.commit()
                session.refresh(run)
            logger.info(f"✅ Прогон #{run.id} ({command}, {status}) сохранён в архив")
            return run.id
        except SQLAlchemyError as e:
            logger.error(f"❌ Ошибка сохранения прогона: {e}")
            raise StablePolyError(f"Не удалось сохранить прогон: {e}")

    def get_run(self, run_id: int) -> Optional[AnalysisRun]:
        try:
            with self.session() as session:
                return session.get(AnalysisRun, run_id)
        except SQLAlchemyError as e:
            logger.error(f"❌ Ошибка чтения прогона {run_id}: {e}")
            raise StablePolyError(f"Не удалось прочитать прогон: {e}")

    def list_runs(self, input_hash: Optional[str] = None, limit: int = 20) -> List[AnalysisRun]:
        """Последние прогоны, при необходимости - только для одного входа"""
        query = select(AnalysisRun).order_by(AnalysisRun.id.desc()).limit(limit)
        if input_hash:
            query = query.where(AnalysisRun.input_hash == input_hash)
        try:
            with self.session() as session:
                return list(session.execute(query).scalars().all())
        except SQLAlchemyError as e:
            logger.error(f"❌ Ошибка чтения архива: {e}")
            raise StablePolyError(f"Не удалось прочитать архив: {e}")

    def find_cached(self, input_hash: str, command: str, seed: Optional[int]) -> Optional[AnalysisRun]:
        """Последний успешный прогон той же команды на том же входе"""
        query = (
            select(AnalysisRun)
            .where(AnalysisRun.input_hash == input_hash)
            .where(AnalysisRun.command == command)
            .where(AnalysisRun.seed == seed)
            .where(AnalysisRun.status == "PASS")
            .order_by(AnalysisRun.id.desc())
            .limit(1)
        )
        try:
            with self.session() as session:
                return session.execute(query).scalar_one_or_none()
        except SQLAlchemyError as e:
            logger.error(f"❌ Ошибка поиска в архиве: {e}")
            raise StablePolyError(f"Не удалось выполнить поиск: {e}")
