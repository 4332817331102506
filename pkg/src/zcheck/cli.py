"""``zcheck`` command line: parse, check, verify, audit, validate."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, TextIO

from .checker import (
    CheckFailure,
    FailureKind,
    audit_questions,
    check_term,
    verify_projection_theorem,
)
from .lexicon import Lexicon, LexiconError, load_lexicon, read_lexicon, validate_lexicon
from .parser import ParseError, parse_expression

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_LEXICON = 3
EXIT_USAGE = 64

MAX_DEPTH = 6

_COLORS = {"HOLDS": "32", "yes": "32", "FAILS": "31", "no": "31"}


@dataclass(frozen=True)
class CliConfig:
    lexicon_path: Path
    format: str = "text"
    depth: int = 2
    color: bool = False


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-l", "--lexicon", required=True, help="lexicon file")
    common.add_argument("--format", choices=("text", "records"), default="text")
    common.add_argument("--depth", type=int, default=2, help="fragment depth for verify")
    common.add_argument("--color", action="store_true")

    parser = _Parser(prog="zcheck", description="Type checker for selectional restrictions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [
        ("parse", "parse an expression into a relation formula"),
        ("check", "print the typing derivation of an expression"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("-e", "--expression", dest="expression_opt")
        p.add_argument("expression", nargs="?")
    sub.add_parser("verify", parents=[common], help="verify restrictions cover exactly the argument positions")
    sub.add_parser("audit", parents=[common], help="report which entries project restrictions")
    sub.add_parser("validate", parents=[common], help="list lexicon invariant violations")
    return parser


def _record(kind: str, **fields) -> str:
    return "\t".join([kind, *(f"{k}={v}" for k, v in fields.items())])


class _Out:
    def __init__(self, config: CliConfig, stream: TextIO):
        self.config = config
        self.stream = stream

    def paint(self, word: str) -> str:
        if self.config.color and self.config.format == "text" and word in _COLORS:
            return f"\x1b[{_COLORS[word]}m{word}\x1b[0m"
        return word

    def line(self, text: str = ""):
        self.stream.write(text + "\n")


def _load(config: CliConfig, err: TextIO) -> Optional[Lexicon]:
    try:
        text = config.lexicon_path.read_text(encoding="utf-8")
    except OSError as exc:
        err.write(f"zcheck: cannot read lexicon: {exc}\n")
        return None
    try:
        return load_lexicon(text, str(config.lexicon_path))
    except LexiconError as exc:
        err.write(f"{exc}\n")
        return None


def cmd_parse(config: CliConfig, expression: str, out: TextIO, err: TextIO) -> int:
    lex = _load(config, err)
    if lex is None:
        return EXIT_LEXICON
    try:
        term = parse_expression(expression, lex)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    o = _Out(config, out)
    if config.format == "records":
        o.line(_record("term", formula=term, order=term.order))
    else:
        o.line(f"{term} : M_{term.order}")
    return EXIT_OK


def cmd_check(config: CliConfig, expression: str, out: TextIO, err: TextIO) -> int:
    lex = _load(config, err)
    if lex is None:
        return EXIT_LEXICON
    try:
        term = parse_expression(expression, lex)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    try:
        deriv = check_term(term, lex)
    except CheckFailure as exc:
        if exc.kind is FailureKind.RESTRICTION_VIOLATION:
            err.write(f"{exc.message}\n")
            return EXIT_FAIL
        err.write(f"check failure ({exc.kind.value}): {exc.message}\n")
        return EXIT_PARSE
    o = _Out(config, out)
    if config.format == "records":
        for depth, node in deriv.lines():
            fields = dict(depth=depth, rule=node.rule, conclusion=node.conclusion)
            if node.cited:
                fields["cited"] = "; ".join(str(c) for c in node.cited)
            o.line(_record("step", **fields))
    else:
        o.line(deriv.render())
    return EXIT_OK


def cmd_verify(config: CliConfig, out: TextIO, err: TextIO) -> int:
    lex = _load(config, err)
    if lex is None:
        return EXIT_LEXICON
    report = verify_projection_theorem(lex, config.depth)
    o = _Out(config, out)
    status = "HOLDS" if report.holds else "FAILS"
    if config.format == "records":
        o.line(_record("header", note=report.note, positions=f"1..{report.max_position}", depth=report.depth))
        for v in report.checked:
            o.line(_record("term", formula=v.term, arity=v.arity, verdict="ok" if v.holds else "fail"))
        for c in report.counterexamples:
            o.line(_record("counterexample", formula=c.term, position=c.position, direction=c.direction))
        o.line(_record("summary", theorem=status, counterexamples=len(report.counterexamples),
                       depth=report.depth))
    else:
        o.line(f"# {report.note}; positions checked 1..{report.max_position}")
        for v in report.checked:
            o.line(f"{'ok' if v.holds else 'FAIL':<4}  {v.term}  arity={v.arity}")
        for c in report.counterexamples:
            why = ("suitable position lacks a restriction" if c.direction == "forward"
                   else "restriction outside the argument positions")
            o.line(f"counterexample: {c.term} position {c.position} ({c.arrow}: {why})")
        o.line(f"theorem: {o.paint(status)} ({len(report.counterexamples)} counterexamples, depth {report.depth})")
    return EXIT_OK if report.holds else EXIT_FAIL


def cmd_audit(config: CliConfig, out: TextIO, err: TextIO) -> int:
    lex = _load(config, err)
    if lex is None:
        return EXIT_LEXICON
    q1, q2 = audit_questions(lex)
    q1_names = [e.surface for e in q1.violators]
    q2_names = [f"{e.surface}: position {pos}" for e, pos in q2.violators]
    o = _Out(config, out)
    if config.format == "records":
        o.line(_record("q1", answer="yes" if q1.holds else "no", violators=",".join(q1_names)))
        o.line(_record("q2", answer="yes" if q2.holds else "no",
                       violators=",".join(f"{e.surface}:{pos}" for e, pos in q2.violators)))
    else:
        for label, ans, names in (("Q1", q1, q1_names), ("Q2", q2, q2_names)):
            if ans.holds:
                o.line(f"{label}: {o.paint('yes')}")
            else:
                o.line(f"{label}: {o.paint('no')} ({', '.join(names)})")
    return EXIT_OK


def cmd_validate(config: CliConfig, out: TextIO, err: TextIO) -> int:
    try:
        text = config.lexicon_path.read_text(encoding="utf-8")
    except OSError as exc:
        err.write(f"zcheck: cannot read lexicon: {exc}\n")
        return EXIT_LEXICON
    parsed = read_lexicon(text)
    problems = list(parsed.errors)
    problems += [parsed.locate(v) for v in validate_lexicon(parsed.lexicon)]
    problems.sort(key=lambda e: (e.line, e.column))
    o = _Out(config, out)
    for p in problems:
        if config.format == "records":
            o.line(_record("violation", line=p.line, column=p.column, message=p.message))
        else:
            o.line(f"{config.lexicon_path}:{p}")
    if config.format == "records":
        o.line(_record("summary", valid="yes" if not problems else "no", violations=len(problems)))
    else:
        o.line("valid" if not problems else f"invalid ({len(problems)} violations)")
    return EXIT_OK if not problems else EXIT_LEXICON


def main(argv: Optional[list[str]] = None, out: Optional[TextIO] = None,
         err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _build_parser().parse_args(argv)
        if not 0 <= args.depth <= MAX_DEPTH:
            raise UsageError(f"--depth must be in 0..{MAX_DEPTH}")
        config = CliConfig(Path(args.lexicon), args.format, args.depth, args.color)
        if args.command in ("parse", "check"):
            expression = args.expression_opt or args.expression
            if args.expression_opt and args.expression:
                raise UsageError("give the expression once, either with -e or positionally")
            if not expression:
                raise UsageError("an expression is required")
    except UsageError as exc:
        err.write(f"zcheck: usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    if args.command == "parse":
        return cmd_parse(config, expression, out, err)
    if args.command == "check":
        return cmd_check(config, expression, out, err)
    if args.command == "verify":
        return cmd_verify(config, out, err)
    if args.command == "audit":
        return cmd_audit(config, out, err)
    return cmd_validate(config, out, err)


def run():
    sys.exit(main())
