"""Map a segmented token sequence to a relation formula ``head(args)``.

Reduction is precedence-driven: at each step, every contiguous window made of
a head atom and constituents matching some head rule's argument universes (in
order, on either side of the head) is a candidate. The highest-precedence
candidate wins, ties go to the leftmost window.
"""

from __future__ import annotations

import re
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

from .core import App, Atom, MTerm
from .lexicon import HeadRule, Lexicon


class ParseError(Exception):
    """Raised when input cannot be mapped to a single term.

    ``kind`` is one of ``unknown_token``, ``no_rule``, ``ambiguous``,
    ``unbalanced``, ``arity``, ``empty``.
    """

    def __init__(self, kind: str, message: str, *, token: Optional[str] = None,
                 residual: Sequence["Constituent"] = ()):
        super().__init__(message)
        self.kind = kind
        self.token = token
        self.residual = tuple(residual)


@dataclass(frozen=True)
class Constituent:
    term: MTerm
    external_universe: str
    span: tuple[int, int]

    def __str__(self):
        return f"{self.term}:{self.external_universe}"


@dataclass(frozen=True)
class _Candidate:
    rule: HeadRule
    start: int
    head_index: int
    width: int


def _atoms(tokens: Sequence[str], lex: Lexicon) -> list[Constituent]:
    out = []
    for i, tok in enumerate(tokens):
        entry = lex.entry(tok)
        if entry is None:
            raise ParseError("unknown_token", f"unknown token {tok!r}", token=tok)
        out.append(Constituent(Atom(entry), entry.universe, (i, i + 1)))
    return out


def _is_open_head(c: Constituent, rule: HeadRule) -> bool:
    return (
        isinstance(c.term, Atom)
        and c.external_universe == rule.head_universe
        and c.term.entry.arity == len(rule.arg_universes)
    )


def _candidates(cs: list[Constituent], lex: Lexicon) -> list[_Candidate]:
    found = []
    for rule in lex.head_rules:
        k = len(rule.arg_universes)
        for i, c in enumerate(cs):
            if not _is_open_head(c, rule):
                continue
            # the head may sit anywhere inside its window; arguments keep their order
            for start in range(max(0, i - k), min(i, len(cs) - k - 1) + 1):
                window = cs[start:start + k + 1]
                args = window[:i - start] + window[i - start + 1:]
                if tuple(a.external_universe for a in args) == rule.arg_universes:
                    found.append(_Candidate(rule, start, i, k + 1))
    return found


def _reduce(cs: list[Constituent], cand: _Candidate) -> list[Constituent]:
    window = cs[cand.start:cand.start + cand.width]
    head = cs[cand.head_index]
    args = tuple(c.term for c in window if c is not head)
    merged = Constituent(
        App(head.term, args),
        cand.rule.external_universe,
        (window[0].span[0], window[-1].span[1]),
    )
    return cs[:cand.start] + [merged] + cs[cand.start + cand.width:]


def reduction_steps(tokens: Sequence[str], lex: Lexicon) -> list[list[Constituent]]:
    """Every intermediate constituent sequence, from the atoms to the final term."""
    if not tokens:
        raise ParseError("empty", "empty input")
    cs = _atoms(tokens, lex)
    steps = [cs]
    while len(cs) > 1:
        cands = _candidates(cs, lex)
        if not cands:
            raise ParseError(
                "no_rule",
                "no applicable head rule; residual constituents: " + " ".join(str(c) for c in cs),
                residual=cs,
            )
        top = max(c.rule.precedence for c in cands)
        best = [c for c in cands if c.rule.precedence == top]
        start = min(c.start for c in best)
        best = [c for c in best if c.start == start]
        width = min(c.width for c in best)
        same = [c for c in best if c.width == width]
        if len(same) > 1:
            readings = ", ".join(f"{c.rule} (head {cs[c.head_index].term})" for c in same)
            raise ParseError("ambiguous", f"ambiguous head rules at precedence {top}: {readings}",
                             residual=cs)
        cs = _reduce(cs, same[0])
        steps.append(cs)
    return steps


def parse(tokens: Sequence[str] | str, lex: Lexicon) -> MTerm:
    if isinstance(tokens, str):
        tokens = tokens.split()
    return reduction_steps(tokens, lex)[-1][0].term


_BRACKET_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_bracketed(text: str, lex: Lexicon) -> MTerm:
    """Build the term exactly as bracketed: ``(head arg ...)``, head first."""
    toks = _BRACKET_TOKEN.findall(text)
    depth = 0
    for t in toks:
        depth += {"(": 1, ")": -1}.get(t, 0)
        if depth < 0:
            raise ParseError("unbalanced", "unbalanced brackets: unexpected ')'")
    if depth:
        raise ParseError("unbalanced", "unbalanced brackets: missing ')'")
    if not toks:
        raise ParseError("empty", "empty input")
    for t in toks:
        if t not in "()" and lex.entry(t) is None:
            raise ParseError("unknown_token", f"unknown token {t!r}", token=t)

    pos = 0

    def node() -> Constituent:
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if tok != "(":
            entry = lex.entry(tok)
            return Constituent(Atom(entry), entry.universe, (pos - 1, pos))
        start = pos - 1
        if toks[pos] in "()":
            raise ParseError("arity", "bracket must start with a head morpheme")
        head_entry = lex.entry(toks[pos])
        pos += 1
        args = []
        while toks[pos] != ")":
            args.append(node())
        pos += 1
        if not args or len(args) != head_entry.arity:
            raise ParseError(
                "arity",
                f"{head_entry.surface} has arity {head_entry.arity}, bracketed with {len(args)} argument(s)",
            )
        arg_universes = tuple(a.external_universe for a in args)
        rules = lex.rules_for(head_entry.universe, arg_universes)
        if not rules:
            raise ParseError(
                "no_rule",
                f"no head rule {head_entry.universe}({','.join(arg_universes)}) for {head_entry.surface}",
            )
        term = App(Atom(head_entry), tuple(a.term for a in args))
        return Constituent(term, rules[0].external_universe, (start, pos))

    result = node()
    if pos != len(toks):
        raise ParseError("unbalanced", "trailing input after the first expression")
    return result.term


def parse_expression(text: str, lex: Lexicon) -> MTerm:
    """Bracketed mode when the text starts with ``(``, flat reduction otherwise."""
    if text.lstrip().startswith("("):
        return parse_bracketed(text, lex)
    return parse(text.split(), lex)
