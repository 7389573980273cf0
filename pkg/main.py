#!/usr/bin/env python3
"""
jcond command line: classify, junction, check.

Exit codes: 0 ok / resoluble / consistent, 1 input or scenario error,
2 not resoluble / violated, 3 missing or invalid MH certificate, 4 inconclusive.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from analytics.numcheck import CONSISTENT, VIOLATED, ScenarioSpec, convergence_study
from analytics.report_generator import build_document, render_json, render_latex
from core.errors import JcondError, MHOrderError, ParseError, ScenarioError
from engine.classify import mh_certificate_from_system, mh_verify, resoluble_decompose
from engine.junction import derive_conditions
from infra.config import JcondSettings, load_settings, parse_eps_list
from infra.pdemodel import PDESystem, parse_system
from monitoring.telemetry_logger import setup_logging

logger = logging.getLogger("jcond")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NEGATIVE = 2
EXIT_NO_MH = 3
EXIT_INCONCLUSIVE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jcond", description="Junction conditions for jump solutions of polynomial PDE systems")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("input", help="system file in the jcond DSL")
        p.add_argument("--json", action="store_true", help="emit JSON (default)")
        p.add_argument("--out", metavar="PATH", help="write the document to PATH instead of stdout")
        p.add_argument("--verbose", action="store_true", help="log progress to stderr")

    common(sub.add_parser("classify", help="decide resolubility and emit certificates"))
    junction = sub.add_parser("junction", help="derive junction conditions")
    common(junction)
    junction.add_argument("--method", choices=("resoluble", "mh"), default="resoluble")
    junction.add_argument("--latex", action="store_true", help="emit LaTeX instead of JSON")
    check = sub.add_parser("check", help="numerical mollification check")
    common(check)
    check.add_argument("--eps", metavar="e1,e2,...", help="descending mollifier widths")
    check.add_argument("--grid", metavar="N", type=int, help="points per axis of the domain grid")
    return parser


def load_system(path: str) -> PDESystem:
    text = Path(path).read_text(encoding="utf-8")
    return parse_system(text)


def cmd_classify(system: PDESystem, args, settings: JcondSettings) -> Tuple[str, int]:
    report = resoluble_decompose(system)
    doc = build_document(system.name, report=report)
    return render_json(doc), EXIT_OK if report.resoluble else EXIT_NEGATIVE


def cmd_junction(system: PDESystem, args, settings: JcondSettings) -> Tuple[str, int]:
    if args.method == "mh":
        try:
            cert = mh_certificate_from_system(system)
        except MHOrderError as exc:
            logger.error(f"❌ invalid MH certificate: {exc}")
            return "", EXIT_NO_MH
        if cert is None:
            logger.error("❌ --method mh needs an 'mh' certificate block in the input")
            return "", EXIT_NO_MH
        if not mh_verify(system, cert):
            logger.error("❌ the MH certificate does not expand to the system's operators")
            return "", EXIT_NO_MH
        report = None
        conds = derive_conditions(system, "mh", cert)
    else:
        report = resoluble_decompose(system)
        if not report.resoluble:
            return render_json(build_document(system.name, report=report)), EXIT_NEGATIVE
        conds = derive_conditions(system, "resoluble", report.certificate)
    logger.info(f"✅ {len(conds.required())} required conditions, {len(conds.satisfied())} satisfied by hypothesis")
    if args.latex:
        return render_latex(conds, system.coords, system.name), EXIT_OK
    return render_json(build_document(system.name, report=report, conds=conds)), EXIT_OK


def cmd_check(system: PDESystem, args, settings: JcondSettings) -> Tuple[str, int]:
    scenario = ScenarioSpec.from_system(system)
    widths = parse_eps_list(args.eps) if args.eps else settings.eps
    report = resoluble_decompose(system)
    conds = derive_conditions(system, "resoluble", report.certificate) if report.resoluble else None
    study = convergence_study(
        scenario,
        widths,
        seed=settings.seed,
        radius=settings.test_radius,
        tolerances=settings.tolerances,
        grid_points=args.grid,
        conds=conds,
    )
    logger.info("\n" + study.to_table())
    doc = build_document(system.name, report=report, conds=conds, residuals=study.to_dict())
    if study.verdict == CONSISTENT:
        code = EXIT_OK
    elif study.verdict == VIOLATED:
        code = EXIT_NEGATIVE
    else:
        code = EXIT_INCONCLUSIVE
    return render_json(doc), code


COMMANDS = {"classify": cmd_classify, "junction": cmd_junction, "check": cmd_check}


def emit(text: str, out: Optional[str]) -> None:
    if not text:
        return
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    settings = load_settings()
    args = build_parser().parse_args(argv)
    setup_logging("INFO" if args.verbose else settings.log_level)

    try:
        system = load_system(args.input)
    except (OSError, UnicodeDecodeError) as exc:
        logger.error(f"❌ cannot read {args.input}: {exc}")
        return EXIT_INPUT
    except ParseError as exc:
        for diag in exc.diagnostics:
            sys.stderr.write(f"{args.input}:{diag}\n")
        return EXIT_INPUT

    try:
        text, code = COMMANDS[args.command](system, args, settings)
    except ScenarioError as exc:
        logger.error(f"❌ scenario error: {exc}")
        return EXIT_INPUT
    except (JcondError, ValueError) as exc:
        logger.error(f"❌ {args.command} failed: {exc}")
        return EXIT_INPUT
    emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
