"""
Инициализация архива прогонов
"""
import logging
import sys
from typing import Optional

from .database import Database
from .utils.errors import StablePolyError

logger = logging.getLogger(__name__)


def init_database(url: Optional[str] = None) -> bool:
    """Создаёт таблицы архива"""
    try:
        logger.info("📊 Инициализация архива...")
        Database(url).create_tables()
        logger.info("✅ Архив полностью инициализирован")
        return True
    except StablePolyError as e:
        logger.error(f"❌ Ошибка инициализации архива: {e}")
        return False


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    sys.exit(0 if init_database(sys.argv[1] if len(sys.argv) > 1 else None) else 1)
