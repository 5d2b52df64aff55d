import json
import logging
import sys
from typing import Any, Dict, List, Optional

from .config import Config, config, load_config
from .core.codec import dumps, jsonable
from .handlers.commands import HANDLERS, build_parser, render_text
from .utils.errors import StablePolyError

logger = logging.getLogger(__name__)

EXIT_FAIL = 4
POLY_ARGS = ("file", "q", "other")


def setup_logging(level: str = "WARNING", log_file: str = "") -> None:
    """Логи в stderr (stdout занят отчётом) и, если задан, в файл"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.WARNING),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )


def _file_content(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError):
        return path


def _input_echo(args) -> Dict[str, Any]:
    """Аргументы запуска без служебных флагов вывода; файлы многочленов подставляются содержимым"""
    skip = {"out", "archive", "log_level", "config", "reuse"}
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    for key in POLY_ARGS:
        if echo.get(key):
            echo[key] = _file_content(echo[key])
    return echo


def _cache_key(args, cfg: Config) -> Dict[str, Any]:
    """Вход прогона вместе с действующими допусками"""
    tolerances = {k: v for k, v in cfg.echo().items() if not k.startswith("LOG_")}
    return {"input": _input_echo(args), "config": tolerances}


def _history(args, cfg: Config) -> int:
    from .database import Database

    db = Database(args.archive or cfg.DB_URL)
    db.create_tables()
    runs = [run.summary() for run in db.list_runs(args.hash, args.limit)]
    _emit({"runs": runs}, args.out)
    return 0


def _archive(args, cfg: Config, payload: Dict[str, Any], status: str, code: int) -> None:
    from .database import Database

    try:
        db = Database(args.archive or cfg.DB_URL)
        db.create_tables()
        db.save_run(args.command, _cache_key(args, cfg), cfg.SEED, status, code, jsonable(payload), cfg.echo())
    except StablePolyError as e:
        logger.error(f"❌ Прогон не сохранён в архив: {e}")


def _cached(args, cfg: Config) -> Optional[Dict[str, Any]]:
    """Последний PASS-прогон той же команды на том же входе, seed и допусках"""
    from .database import Database, input_hash

    try:
        db = Database(args.archive or cfg.DB_URL)
        db.create_tables()
        run = db.find_cached(input_hash(_cache_key(args, cfg)), args.command, cfg.SEED)
    except StablePolyError as e:
        logger.warning(f"⚠️ Архив недоступен для повторного использования: {e}")
        return None
    if run is None:
        return None
    logger.info(f"✅ Использован прогон #{run.id} из архива")
    return run.report


def _emit(payload: Any, out: str) -> None:
    if out == "text":
        print(render_text(jsonable(payload)))
    else:
        print(dumps(payload))


def run(argv: Optional[List[str]] = None) -> int:
    """Точка входа CLI: код выхода 0, 2 (вход), 3 (предусловие), 4 (FAIL)"""
    args = build_parser().parse_args(argv)

    # 1. Конфигурация и логирование
    try:
        cfg = load_config(args.config) if args.config else config
        if args.seed is not None:
            cfg = cfg.with_overrides({"SEED": args.seed})
    except StablePolyError as e:
        setup_logging(config.LOG_LEVEL, config.LOG_FILE)
        logger.error(f"❌ {e.message}")
        _emit(e.to_dict(), args.out)
        return e.exit_code
    args.seed = cfg.SEED
    setup_logging(args.log_level or cfg.LOG_LEVEL, cfg.LOG_FILE)
    logger.info(f"🚀 Команда {args.command}, seed {cfg.SEED}")

    if args.command == "history":
        try:
            return _history(args, cfg)
        except StablePolyError as e:
            _emit(e.to_dict(), args.out)
            return e.exit_code

    if args.reuse and args.archive is not None:
        cached = _cached(args, cfg)
        if cached is not None:
            _emit(cached, args.out)
            return 0

    # 2. Выполнение
    try:
        payload, status = HANDLERS[args.command](args, cfg)
        code = EXIT_FAIL if status == "FAIL" else 0
    except StablePolyError as e:
        logger.error(f"❌ {type(e).__name__}: {e.message}")
        payload, status, code = e.to_dict(), "ERROR", e.exit_code
    payload = {"command": args.command, "status": status, "result": payload, "config": cfg.echo()}

    # 3. Вывод и архив
    _emit(payload, args.out)
    if args.archive is not None:
        _archive(args, cfg, payload, status, code)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
