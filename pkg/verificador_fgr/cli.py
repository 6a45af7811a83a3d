# -*- coding:utf-8 -*-
"""
Interface de linha de comando.

    python -m verificador_fgr verify all [--parallel] [--json out.json]
    python -m verificador_fgr verify gamma_131
    python -m verificador_fgr reduce "r3"
    python -m verificador_fgr eval "2*sqrt2*b3 - b5"
    python -m verificador_fgr constants
    python -m verificador_fgr report out.json
    python -m verificador_fgr list

Flags têm precedência sobre variáveis de ambiente FGR_*, que têm
precedência sobre os padrões.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, Mapping, Optional, Sequence, TextIO

from . import paperpipeline, quadrature
from .basisreduce import BasisCombo, flags, reduce_full
from .constants import Constants
from .exactfield import FieldElem
from .errors import AnomalyError, ExpressionSyntaxError, FixtureError, NonConvergence, UnknownClaim, VerificationError
from .exprparse import parse_basis_expr as _parse_basis_expr
from .fixtures import default_fixtures
from .logger import level_from_verbosity, setup_logging
from .quadrature import QuadConfig, TStrategy
from .report import dumps, load_report, write_report

logger = logging.getLogger(__name__)


class Command(Enum):
    VERIFY_ALL = "verify_all"
    VERIFY_CLAIM = "verify_claim"
    REDUCE = "reduce"
    EVAL = "eval"
    CONSTANTS = "constants"
    REPORT = "report"
    LIST = "list"


class OutputFormat(Enum):
    TEXT = "text"
    JSON = "json"


_NEEDS_ARGUMENT = (Command.VERIFY_CLAIM, Command.REDUCE, Command.EVAL, Command.REPORT)


@dataclass(frozen=True)
class RunConfig:
    command: Command
    argument: Optional[str] = None
    tol: float = Constants.DEFAULT_TOL
    truncation: float = Constants.DEFAULT_TRUNCATION
    parallel: bool = False
    output_format: OutputFormat = OutputFormat.TEXT
    json_path: Optional[Path] = None
    t_strategy: TStrategy = TStrategy.CONVOLUTION_CACHED
    precision: int = Constants.DEFAULT_PRECISION
    numeric: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        if not self.truncation > 0:
            raise ValueError(f"truncation must be positive, got {self.truncation}")
        if self.precision < 2:
            raise ValueError(f"precision must be at least 2 bits, got {self.precision}")
        if self.command in _NEEDS_ARGUMENT and not self.argument:
            raise ValueError(f"command {self.command.value} needs an argument")

    def quad_config(self) -> QuadConfig:
        return QuadConfig(abs_tol=self.tol, truncation_radius=self.truncation, T_strategy=self.t_strategy)


def parse_basis_expr(text: str) -> BasisCombo:
    """Parse e.g. ``2*sqrt2*b3 - b5``; errors carry the offending position."""
    return _parse_basis_expr(text)


def _env(environ: Mapping[str, str], name: str, cast: Callable, default):
    raw = environ.get(Constants.ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise ValueError(f"invalid {Constants.ENV_PREFIX}{name}={raw!r}: {exc}") from exc


def _flag(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol', action="store", dest='tol', type=float, default=None,
                        help=f"Absolute quadrature tolerance (default {Constants.DEFAULT_TOL}).")
    common.add_argument('--truncation', action="store", dest='truncation', type=float, default=None,
                        help=f"Integration window [-X, X] (default {Constants.DEFAULT_TRUNCATION}).")
    common.add_argument('--json', action="store", dest='json_path', type=Path, default=None,
                        help="Write the report to this file.")
    common.add_argument('--parallel', action="store_const", dest='parallel', const=True, default=None,
                        help="Verify claims concurrently.")
    common.add_argument('--format', action="store", dest='output_format', choices=[f.value for f in OutputFormat],
                        default=None, help="Output format on stdout.")
    common.add_argument('--t-strategy', action="store", dest='t_strategy', choices=[s.value for s in TStrategy],
                        default=None, help="How the kernel T is evaluated.")
    common.add_argument('--precision', action="store", dest='precision', type=int, default=None,
                        help="Bits used to turn exact coefficients into numbers.")
    common.add_argument('--symbolic-only', action="store_const", dest='numeric', const=False, default=None,
                        help="Skip all quadrature.")
    common.add_argument('--log-file', action="store", dest='log_file', default=None, help="Rotating log file.")
    common.add_argument('-v', '--verbose', action="count", dest='verbosity', default=0,
                        help="More logging (-v, -vv).")

    parser = argparse.ArgumentParser(prog='verificador_fgr', description='Fermi Golden Rule constant verifier')
    sub = parser.add_subparsers(dest='command', required=True)
    verify = sub.add_parser('verify', parents=[common], help="Verify all claims or one claim id.")
    verify.add_argument('target', nargs='?', default='all')
    reduce = sub.add_parser('reduce', parents=[common], help="Reduce an expression to core bases.")
    reduce.add_argument('expression')
    evaluate = sub.add_parser('eval', parents=[common], help="Evaluate an expression numerically.")
    evaluate.add_argument('expression')
    sub.add_parser('constants', parents=[common], help="Symbolic and numeric values of the constants.")
    report = sub.add_parser('report', parents=[common], help="Render a saved JSON report.")
    report.add_argument('path')
    sub.add_parser('list', parents=[common], help="List the claim ids.")
    return parser


def config_from_args(args: argparse.Namespace, environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    environ = os.environ if environ is None else environ

    def pick(value, name, cast, default):
        return value if value is not None else _env(environ, name, cast, default)

    if args.command == 'verify':
        command = Command.VERIFY_ALL if args.target == 'all' else Command.VERIFY_CLAIM
        argument = None if args.target == 'all' else args.target
    elif args.command in ('reduce', 'eval'):
        command = Command.REDUCE if args.command == 'reduce' else Command.EVAL
        argument = args.expression
    elif args.command == 'report':
        command, argument = Command.REPORT, args.path
    else:
        command, argument = Command(args.command), None

    json_path = pick(args.json_path, "JSON", Path, None)
    return RunConfig(
        command=command,
        argument=argument,
        tol=pick(args.tol, "TOL", float, Constants.DEFAULT_TOL),
        truncation=pick(args.truncation, "TRUNCATION", float, Constants.DEFAULT_TRUNCATION),
        parallel=pick(args.parallel, "PARALLEL", _flag, False),
        output_format=OutputFormat(pick(args.output_format, "FORMAT", str, OutputFormat.TEXT.value)),
        json_path=json_path,
        t_strategy=TStrategy(pick(args.t_strategy, "T_STRATEGY", str, TStrategy.CONVOLUTION_CACHED.value)),
        precision=pick(args.precision, "PRECISION", int, Constants.DEFAULT_PRECISION),
        numeric=pick(args.numeric, "NUMERIC", _flag, True),
    )


def _emit(stream: TextIO, cfg: RunConfig, text: str, payload) -> None:
    if cfg.output_format is OutputFormat.JSON:
        stream.write(dumps(payload))
    else:
        stream.write(text + "\n")


def _run_verify_all(cfg: RunConfig, stream: TextIO) -> int:
    suite = paperpipeline.verify_all(cfg.quad_config(), parallel=cfg.parallel, numeric=cfg.numeric)
    if cfg.json_path is not None:
        write_report(suite, cfg.json_path)
    _emit(stream, cfg, suite.render_text(), suite)
    return Constants.EXIT_OK if suite.passed else Constants.EXIT_FAILED


def _run_verify_claim(cfg: RunConfig, stream: TextIO) -> int:
    report = paperpipeline.verify_claim(cfg.argument, cfg.quad_config(), numeric=cfg.numeric)
    if cfg.json_path is not None:
        write_report(report, cfg.json_path)
    _emit(stream, cfg, str(report), report)
    return Constants.EXIT_OK if report.passed() else Constants.EXIT_FAILED


def _run_reduce(cfg: RunConfig, stream: TextIO) -> int:
    combo = parse_basis_expr(cfg.argument)
    reduced = reduce_full(combo)
    notes = flags(reduced)
    text = reduced.render(Constants.CORE_DISPLAY_ORDER)
    if notes:
        text += "\n" + "\n".join(f"note: {n}" for n in notes)
    _emit(stream, cfg, text, {"input": cfg.argument, "reduced": reduced.to_json(),
                              "text": reduced.render(Constants.CORE_DISPLAY_ORDER), "flags": notes})
    return Constants.EXIT_OK


def _run_eval(cfg: RunConfig, stream: TextIO) -> int:
    combo = parse_basis_expr(cfg.argument)
    result = quadrature.eval_combo(combo, cfg.quad_config(), precision=cfg.precision)
    reduced = reduce_full(combo)
    text = (f"{combo} = {result.value:.15g} (error estimate {result.error_estimate:.2e})\n"
            f"reduced: {reduced.render(Constants.CORE_DISPLAY_ORDER)}")
    _emit(stream, cfg, text, {"input": cfg.argument, "value": result.value,
                              "error_estimate": result.error_estimate, "reduced": reduced.to_json()})
    return Constants.EXIT_OK


def _run_constants(cfg: RunConfig, stream: TextIO) -> int:
    symbolic = paperpipeline.gamma_symbolic()
    payload: Dict = {"gamma_symbolic": symbolic.render(), "cancellation": True}
    lines = [f"Gamma = {symbolic}   (= (1/sqrt2)*p1)"]
    table = paperpipeline.core_coefficients()
    for target, contributions in table.items():
        total = sum((v for _, v in contributions), FieldElem())
        lines.append(f"  {target}: {len(contributions)} contributions, total {total}")
    status = Constants.EXIT_OK
    if cfg.numeric:
        qcfg = cfg.quad_config()
        g = paperpipeline.gamma_numeric(qcfg, precision=cfg.precision, with_direct=True)
        c0 = paperpipeline.c0_numeric(qcfg)
        lines += [
            f"p1          = {g.p1:.15g}   closed form pi/cosh(pi/2) = {quadrature.p1_closed_form():.15g}",
            f"Gamma       = {g.value:.15g}   closed form = {g.closed_form:.15g}   difference {g.difference:.2e}",
            f"Gamma (sum of defining integrals) = {g.direct:.15g}",
            f"c0          = {c0.value:.15g}   kernel paths differ by {c0.difference:.2e}",
        ]
        payload.update({"gamma_numeric": g.value, "p1": g.p1, "closed_form": g.closed_form,
                        "difference": g.difference, "direct": g.direct, "c0": c0.value,
                        "c0_kernel_difference": c0.difference})
        if g.difference >= Constants.NUMERIC_TOL or not c0.consistent:
            status = Constants.EXIT_FAILED
    _emit(stream, cfg, "\n".join(lines), payload)
    return status


def _run_report(cfg: RunConfig, stream: TextIO) -> int:
    suite = load_report(cfg.argument)
    _emit(stream, cfg, suite.render_text(), suite)
    return Constants.EXIT_OK if suite.passed else Constants.EXIT_FAILED


def _run_list(cfg: RunConfig, stream: TextIO) -> int:
    fixtures = default_fixtures()
    text = "\n".join(f"{f.id:<14} {f.stage.value:<20} {f.source}" for f in fixtures.values())
    _emit(stream, cfg, text, [{"id": f.id, "stage": f.stage.value, "expected": f.display}
                              for f in fixtures.values()])
    return Constants.EXIT_OK


_HANDLERS: Dict[Command, Callable[[RunConfig, TextIO], int]] = {
    Command.VERIFY_ALL: _run_verify_all,
    Command.VERIFY_CLAIM: _run_verify_claim,
    Command.REDUCE: _run_reduce,
    Command.EVAL: _run_eval,
    Command.CONSTANTS: _run_constants,
    Command.REPORT: _run_report,
    Command.LIST: _run_list,
}


def run(cfg: RunConfig, stream: Optional[TextIO] = None) -> int:
    """Execute one command; returns the exit status (0 pass, 1 failure, 2 usage error)."""
    stream = stream or sys.stdout
    try:
        return _HANDLERS[cfg.command](cfg, stream)
    except UnknownClaim as exc:
        logger.error("%s", exc)
        return Constants.EXIT_USAGE
    except ExpressionSyntaxError as exc:
        logger.error("cannot parse %r: %s", exc.text, exc)
        return Constants.EXIT_USAGE
    except (OSError, ValueError) as exc:
        logger.error("%s", exc)
        return Constants.EXIT_USAGE
    except (NonConvergence, AnomalyError, FixtureError, VerificationError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return Constants.EXIT_FAILED


def main(argv: Optional[Sequence[str]] = None, environ: Optional[Mapping[str, str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    env = os.environ if environ is None else environ
    log_file = args.log_file or env.get(Constants.ENV_PREFIX + "LOG_FILE") or None
    setup_logging(logfile=log_file, level=level_from_verbosity(args.verbosity))
    try:
        cfg = config_from_args(args, environ)
    except ValueError as exc:
        logger.error("%s", exc)
        return Constants.EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
