"""
Подкоманды CLI: разбор аргументов и вызов сервисов.

Каждый обработчик возвращает (отчёт, статус); статус FAIL даёт код выхода 4.
"""
import argparse
import logging
from typing import Any, Callable, Dict, Tuple

from ..config import Config
from ..core.codec import load_poly, parse_point
from ..core.scalars import Backend
from ..services import agler, boundary, ideal, intersect, oracle
from ..services.analysis import analyze
from ..utils.errors import InputFormatError

logger = logging.getLogger(__name__)

Result = Tuple[Dict[str, Any], str]


def _load(path: str, mode: str = None):
    p = load_poly(path)
    return p.to_backend(Backend(mode)) if mode else p


def _pair(text: str) -> Tuple[int, int]:
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise InputFormatError(f"Ожидалась пара целых J,K: {text!r}")
    return a, b


# ===== ОБРАБОТЧИКИ =====

def cmd_analyze(args, cfg: Config) -> Result:
    bundle = analyze(_load(args.file, args.mode), args.seed, cfg)
    return bundle.to_dict(), "PASS" if bundle.ok else "FAIL"


def cmd_agler(args, cfg: Config) -> Result:
    p = _load(args.file, args.mode)
    system = agler.canonical_system(p, cfg)
    payload = system.to_dict()
    payload["eont_residual"] = agler.eont_residual(p, system=system, seed=args.seed, cfg=cfg)
    payload["matrix_reflection_defect"] = agler.matrix_reflection_defect(system)
    if args.realize:
        payload["realization"] = agler.realize(p, system.E1, system.F2, cfg).to_dict()
    return payload, "PASS"


def cmd_zeros(args, cfg: Config) -> Result:
    p = _load(args.file, args.mode)
    if args.other:
        report = intersect.common_zeros(p, _load(args.other, args.mode), cfg)
    else:
        report = intersect.reflection_pair(p, cfg)
    return report.to_dict(), "PASS"


def cmd_ideal(args, cfg: Config) -> Result:
    p = _load(args.file, args.mode)
    description = ideal.generators(p, cfg=cfg)
    payload = description.to_dict()
    if args.reduce:
        reduced, approximate = ideal.interreduce(description.exact_generators or description.generators, cfg)
        payload["reduced"] = [str(g) for g in reduced]
        payload["reduced_approximate"] = approximate
    if description.exact_generators is not None:
        payload["codimension"] = ideal.codimension(p, description, cfg)
    if args.multipliers:
        payload["multiplier_sup"] = ideal.multiplier_sup(p, description, cfg=cfg).to_dict()
    return payload, "PASS"


def cmd_dim(args, cfg: Config) -> Result:
    p = _load(args.file, args.mode)
    return {"j": args.j, "k": args.k, "dim": ideal.dim_P(p, args.j, args.k, cfg)}, "PASS"


def cmd_member(args, cfg: Config) -> Result:
    p = _load(args.file, args.mode)
    q = _load(args.q, args.mode)
    result = ideal.membership(p, q, ideal.MembershipMode(args.method), cfg=cfg)
    return result.to_dict(), "PASS"


def cmd_boundary(args, cfg: Config) -> Result:
    p = _load(args.file, args.mode)
    point = parse_point(args.point)
    analysis = boundary.regularity_ladder(p, point, args.k_max, cfg=cfg)
    payload = analysis.to_dict()
    if args.remainder and analysis.nu is not None:
        payload["remainder_exponent"] = boundary.remainder_exponent(p, point, analysis, seed=args.seed, cfg=cfg)
    status = "FAIL" if analysis.floor_ok is False or not analysis.bottom_ok else "PASS"
    return payload, status


def cmd_oracle(args, cfg: Config) -> Result:
    p = _load(args.file, args.mode)
    if args.oracle == "l2":
        return oracle.l2_quadrature(_load(args.q, args.mode), p, args.max_grid, cfg).to_dict(), "PASS"
    if args.oracle == "fourier":
        report = oracle.fourier_report(_load(args.q, args.mode), p, _pair(args.box), cfg=cfg)
        payload = report.to_dict()
        if args.csv:
            payload["csv"] = str(oracle.export_csv(report, args.csv))
        return payload, "PASS"
    other = _load(args.other, args.mode) if args.other else p.reflect()
    table = oracle.multiplicity_crosscheck(p, other, parse_point(args.point), args.seed, cfg)
    return table, "PASS" if table["agree"] else "FAIL"


HANDLERS: Dict[str, Callable[[Any, Config], Result]] = {
    "analyze": cmd_analyze,
    "agler": cmd_agler,
    "zeros": cmd_zeros,
    "ideal": cmd_ideal,
    "dim": cmd_dim,
    "member": cmd_member,
    "boundary": cmd_boundary,
    "oracle": cmd_oracle,
}


# ===== ПАРСЕР =====

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-f", "--file", required=True, help="многочлен в JSON")
    common.add_argument("--mode", choices=["exact", "float"], default=None, help="арифметика вычислений")

    parser = argparse.ArgumentParser(prog="stablepoly", description="Анализ устойчивых многочленов от двух переменных")
    parser.add_argument("--out", choices=["json", "text"], default="json")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--config", default=None, help="JSON с переопределениями допусков")
    parser.add_argument("--archive", nargs="?", const="", default=None, metavar="URL",
                        help="сохранять прогон в архив (по умолчанию STABLEPOLY_DB_URL)")
    parser.add_argument("--reuse", action="store_true", help="вернуть сохранённый PASS-прогон, если он есть")
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="полный анализ с перекрёстными проверками")
    a = sub.add_parser("agler", parents=[common], help="каноническая система Аглера")
    a.add_argument("--realize", action="store_true")
    z = sub.add_parser("zeros", parents=[common], help="общие нули с p̃ или другим многочленом")
    z.add_argument("--other", default=None)
    i = sub.add_parser("ideal", parents=[common], help="образующие I_p")
    i.add_argument("--reduce", action="store_true")
    i.add_argument("--multipliers", action="store_true", help="sup |g h e / p| на двух сетках")
    d = sub.add_parser("dim", parents=[common], help="dim P_{j,k}")
    d.add_argument("--j", type=int, required=True)
    d.add_argument("--k", type=int, required=True)
    mb = sub.add_parser("member", parents=[common], help="q ∈ I_p")
    mb.add_argument("--q", required=True)
    mb.add_argument("--method", choices=["exact", "numeric"], default="exact")
    b = sub.add_parser("boundary", parents=[common], help="регулярность p̃/p в точке тора")
    b.add_argument("--point", required=True)
    b.add_argument("--k-max", dest="k_max", type=int, default=None)
    b.add_argument("--remainder", action="store_true")

    o = sub.add_parser("oracle", help="независимые проверки")
    osub = o.add_subparsers(dest="oracle", required=True)
    l2 = osub.add_parser("l2", parents=[common])
    l2.add_argument("--q", required=True)
    l2.add_argument("--max-grid", dest="max_grid", type=int, default=None)
    fr = osub.add_parser("fourier", parents=[common])
    fr.add_argument("--q", required=True)
    fr.add_argument("--box", required=True, help="J,K")
    fr.add_argument("--csv", default=None)
    mu = osub.add_parser("mult", parents=[common])
    mu.add_argument("--other", default=None)
    mu.add_argument("--point", required=True)

    h = sub.add_parser("history", help="прогоны из архива")
    h.add_argument("--hash", default=None)
    h.add_argument("--limit", type=int, default=20)
    return parser


# ===== ТЕКСТОВЫЙ ВЫВОД =====

def render_text(payload: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(payload, dict):
        lines = []
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.append(render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
        return "\n".join(lines)
    if isinstance(payload, list):
        if all(not isinstance(v, (dict, list)) for v in payload):
            return f"{pad}" + ", ".join(str(v) for v in payload)
        return "\n".join(f"{pad}-\n{render_text(v, indent + 1)}" for v in payload)
    return f"{pad}{payload}"
