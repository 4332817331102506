"""Typing derivations, restriction checking, and the projection theorem verifier.

Derivation shapes (premises in order):

* ``MAP``      no premises; concludes ``a : M_n``.
* ``EU-Form``  no premises; concludes ``T : M`` for a declared universe.
* ``CU-Form``  ``EU-Form`` for the head universe, then one per argument universe;
  concludes ``A(B, ...) : M``.
* ``CU-Elim``  ``MAP`` for the head, then ``CU-Form``; cites one membership
  ``b : r`` per restricted position; concludes ``a(b, ...) : M``.
* ``n-Form``   ``CU-Elim`` for the head, then one derivation per argument;
  concludes ``a(b, ...) : M_n`` with ``n`` the term's order.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Optional, Union

from .core import (
    App,
    Atom,
    LexEntry,
    MTerm,
    arity_of,
    order_of,
    p_holds,
    restriction_at,
    term_key,
)
from .lexicon import Lexicon

DEFAULT_DEPTH = 2


class Rule(enum.Enum):
    MAP = "MAP"
    N_FORM = "n-Form"
    EU_FORM = "EU-Form"
    CU_FORM = "CU-Form"
    CU_ELIM = "CU-Elim"

    def __str__(self):
        return self.value


# -- judgments ----------------------------------------------------------------

@dataclass(frozen=True)
class OrderJudgment:
    """``t : M_n``; ``order`` is None for a head whose order depends on its use."""

    term: MTerm
    order: Optional[int]

    def __str__(self):
        return f"{self.term} : M_{'n' if self.order is None else self.order}"


@dataclass(frozen=True)
class UniverseJudgment:
    universe: str

    def __str__(self):
        return f"{self.universe} : M"


@dataclass(frozen=True)
class ComplexUniverseJudgment:
    head_universe: str
    arg_universes: tuple[str, ...]

    def __str__(self):
        return f"{self.head_universe}({','.join(self.arg_universes)}) : M"


@dataclass(frozen=True)
class RelationJudgment:
    """``a(b, ...) : M``: the relation is formed with its restrictions met."""

    term: App

    def __str__(self):
        return f"{self.term} : M"


@dataclass(frozen=True)
class MembershipJudgment:
    term: MTerm
    restriction: str

    def __str__(self):
        return f"{self.term} : {self.restriction}"


Judgment = Union[OrderJudgment, UniverseJudgment, ComplexUniverseJudgment, RelationJudgment, MembershipJudgment]


@dataclass(frozen=True)
class Derivation:
    conclusion: Judgment
    rule: Rule
    premises: tuple["Derivation", ...] = ()
    cited: tuple[MembershipJudgment, ...] = ()

    def walk(self):
        yield self
        for p in self.premises:
            yield from p.walk()

    def lines(self) -> list[tuple[int, "Derivation"]]:
        """Post-order ``(depth, node)`` pairs: premises above their conclusion."""
        out: list[tuple[int, Derivation]] = []

        def visit(d, depth):
            for p in d.premises:
                visit(p, depth + 1)
            out.append((depth, d))

        visit(self, 0)
        return out

    def render(self, indent: str = "  ") -> str:
        rows = []
        for depth, d in self.lines():
            row = f"{indent * depth}{d.rule}  {d.conclusion}"
            if d.cited:
                row += "  [" + ", ".join(str(c) for c in d.cited) + "]"
            rows.append(row)
        return "\n".join(rows)


# -- failures -----------------------------------------------------------------

class FailureKind(enum.Enum):
    UNKNOWN_MORPHEME = "UNKNOWN_MORPHEME"
    NO_RULE = "NO_RULE"
    ARITY_MISMATCH = "ARITY_MISMATCH"
    UNIVERSE_MISMATCH = "UNIVERSE_MISMATCH"
    RESTRICTION_VIOLATION = "RESTRICTION_VIOLATION"


@dataclass(frozen=True)
class ViolationDetail:
    head: LexEntry
    position: int
    required: str
    argument: MTerm
    satisfies: frozenset[str]


class CheckFailure(Exception):
    def __init__(self, kind: FailureKind, subject, message: str,
                 detail: Optional[ViolationDetail] = None):
        super().__init__(message)
        self.kind = kind
        self.subject = subject
        self.detail = detail

    @property
    def message(self) -> str:
        return self.args[0]


def _violation_message(d: ViolationDetail) -> str:
    sats = ", ".join(sorted(d.satisfies))
    return (f"restriction violation: {d.head.surface} requires {d.required} "
            f"at position {d.position}; {d.argument} satisfies {{{sats}}}")


# -- rules --------------------------------------------------------------------

def _resolve(surface: str, lex: Lexicon, subject) -> LexEntry:
    entry = lex.entry(surface)
    if entry is None:
        raise CheckFailure(FailureKind.UNKNOWN_MORPHEME, subject, f"unknown morpheme {surface!r}")
    return entry


def check_map(e: Union[LexEntry, str], lex: Lexicon, *, order: Optional[int] = None) -> Derivation:
    """Lexical judgment for a morpheme.

    Arity-0 entries are 0th-order; a head's order is left open unless the
    caller fixes it.
    """
    surface = e if isinstance(e, str) else e.surface
    entry = _resolve(surface, lex, surface)
    if order is None and entry.arity == 0:
        order = 0
    return Derivation(OrderJudgment(Atom(entry), order), Rule.MAP)


def check_eu_form(u: str, lex: Lexicon) -> Derivation:
    if lex.universe(u) is None:
        raise CheckFailure(FailureKind.UNIVERSE_MISMATCH, u, f"undeclared universe {u!r}")
    return Derivation(UniverseJudgment(u), Rule.EU_FORM)


def external_universe(t: MTerm, lex: Lexicon) -> str:
    """The category a term exposes to a head it is an argument of."""
    if isinstance(t, Atom):
        return _resolve(t.surface, lex, t).universe
    head = _resolve(t.head.surface, lex, t)
    arg_universes = tuple(external_universe(a, lex) for a in t.args)
    rules = lex.rules_for(head.universe, arg_universes)
    if not rules:
        raise CheckFailure(
            FailureKind.UNIVERSE_MISMATCH, t,
            f"no head rule {head.universe}({','.join(arg_universes)}) for {t}",
        )
    return rules[0].external_universe


def satisfied_by(t: MTerm, lex: Lexicon) -> frozenset[str]:
    """Restrictions a term witnesses as an argument.

    Atoms use their declared set. A complex term uses the defaults declared
    for its external universe if any, else inherits from its first argument.
    """
    if isinstance(t, Atom):
        return _resolve(t.surface, lex, t).satisfies
    defaults = lex.universe_defaults(external_universe(t, lex))
    if defaults is not None:
        return defaults
    return satisfied_by(t.args[0], lex)


def check_cu_form(t: App, lex: Lexicon) -> Derivation:
    head = _resolve(t.head.surface, lex, t.head)
    if len(t.args) != head.arity:
        raise CheckFailure(
            FailureKind.ARITY_MISMATCH, t,
            f"{head.surface} has arity {head.arity}, applied to {len(t.args)} argument(s)",
        )
    arg_universes = tuple(external_universe(a, lex) for a in t.args)
    premises = [check_eu_form(head.universe, lex)]
    premises += [check_eu_form(u, lex) for u in arg_universes]
    if not lex.rules_for(head.universe, arg_universes):
        raise CheckFailure(
            FailureKind.UNIVERSE_MISMATCH, t,
            f"no head rule {head.universe}({','.join(arg_universes)}) for {t}",
        )
    return Derivation(ComplexUniverseJudgment(head.universe, arg_universes), Rule.CU_FORM, tuple(premises))


def check_cu_elim(t: App, lex: Lexicon, cu_form: Optional[Derivation] = None) -> Derivation:
    """Check every restricted argument position; the lowest failing one is reported."""
    if cu_form is None:
        cu_form = check_cu_form(t, lex)
    head = _resolve(t.head.surface, lex, t.head)
    cited = []
    for pos, required in head.signature:
        arg = t.args[pos - 1]
        sats = satisfied_by(arg, lex)
        if required not in sats:
            detail = ViolationDetail(head, pos, required, arg, sats)
            raise CheckFailure(FailureKind.RESTRICTION_VIOLATION, t, _violation_message(detail), detail)
        cited.append(MembershipJudgment(arg, required))
    return Derivation(
        RelationJudgment(t), Rule.CU_ELIM,
        (check_map(head, lex), cu_form), tuple(cited),
    )


def check_term(t: MTerm, lex: Lexicon) -> Derivation:
    """Full derivation of ``t : M_n``; raises the innermost, leftmost failure."""
    if isinstance(t, Atom):
        return check_map(t.surface, lex, order=0)
    head = _resolve(t.head.surface, lex, t.head)
    if head.arity != len(t.args):
        raise CheckFailure(
            FailureKind.ARITY_MISMATCH, t,
            f"{head.surface} has arity {head.arity}, applied to {len(t.args)} argument(s)",
        )
    arg_derivs = tuple(check_term(a, lex) for a in t.args)
    elim = check_cu_elim(t, lex)
    return Derivation(OrderJudgment(t, order_of(t)), Rule.N_FORM, (elim, *arg_derivs))


def well_typed(t: MTerm, lex: Lexicon) -> bool:
    try:
        check_term(t, lex)
    except CheckFailure:
        return False
    return True


# -- replay -------------------------------------------------------------------

def replay(d: Derivation, lex: Lexicon) -> list[str]:
    """Re-check every node against its rule's premise schema. Empty means sound."""
    problems: list[str] = []

    def fail(node, msg):
        problems.append(f"{node.rule} {node.conclusion}: {msg}")

    def rules_of(ps):
        return tuple(p.rule for p in ps)

    for node in d.walk():
        c = node.conclusion
        if node.rule is Rule.MAP:
            if node.premises or node.cited:
                fail(node, "MAP takes no premises")
            if not isinstance(c, OrderJudgment) or not isinstance(c.term, Atom):
                fail(node, "MAP concludes an atom judgment")
            elif lex.entry(c.term.surface) != c.term.entry:
                fail(node, "atom is not a lexicon entry")
            elif c.order not in (None, 0):
                fail(node, "an atom has order 0")
        elif node.rule is Rule.EU_FORM:
            if node.premises or node.cited:
                fail(node, "EU-Form takes no premises")
            if not isinstance(c, UniverseJudgment) or lex.universe(c.universe) is None:
                fail(node, "undeclared universe")
        elif node.rule is Rule.CU_FORM:
            if not isinstance(c, ComplexUniverseJudgment):
                fail(node, "CU-Form concludes a complex universe")
                continue
            expected = (c.head_universe, *c.arg_universes)
            got = tuple(getattr(p.conclusion, "universe", None) for p in node.premises)
            if rules_of(node.premises) != (Rule.EU_FORM,) * len(expected) or got != expected:
                fail(node, "premises must be EU-Form for the head and each argument universe")
            if not lex.rules_for(c.head_universe, c.arg_universes):
                fail(node, "no head rule licenses this complex universe")
        elif node.rule is Rule.CU_ELIM:
            if not isinstance(c, RelationJudgment):
                fail(node, "CU-Elim concludes a relation judgment")
                continue
            t = c.term
            if rules_of(node.premises) != (Rule.MAP, Rule.CU_FORM):
                fail(node, "premises must be MAP (head) and CU-Form")
                continue
            if node.premises[0].conclusion.term != t.head:
                fail(node, "MAP premise is not the head")
            try:
                arg_universes = tuple(external_universe(a, lex) for a in t.args)
            except CheckFailure as exc:
                fail(node, str(exc))
                continue
            if node.premises[1].conclusion != ComplexUniverseJudgment(t.head.entry.universe, arg_universes):
                fail(node, "CU-Form premise does not match the term's universes")
            expected = tuple(MembershipJudgment(t.args[p - 1], r) for p, r in t.head.entry.signature)
            if node.cited != expected:
                fail(node, "cited memberships do not match the head's restrictions")
            for m in node.cited:
                if m.restriction not in satisfied_by(m.term, lex):
                    fail(node, f"{m} does not hold")
        elif node.rule is Rule.N_FORM:
            if not isinstance(c, OrderJudgment) or not isinstance(c.term, App):
                fail(node, "n-Form concludes an application judgment")
                continue
            t = c.term
            ps = node.premises
            if len(ps) != 1 + len(t.args) or ps[0].rule is not Rule.CU_ELIM:
                fail(node, "premises must be CU-Elim then one per argument")
                continue
            if ps[0].conclusion != RelationJudgment(t):
                fail(node, "CU-Elim premise concerns another term")
            for a, p in zip(t.args, ps[1:]):
                if not isinstance(p.conclusion, OrderJudgment) or p.conclusion.term != a:
                    fail(node, f"missing argument premise for {a}")
            orders = [p.conclusion.order for p in ps[1:] if isinstance(p.conclusion, OrderJudgment)]
            if None in orders or c.order != 1 + max(orders, default=-1):
                fail(node, "order is not one more than the highest argument order")
    return problems


# -- fragment and theorem -----------------------------------------------------

def enumerate_fragment(lex: Lexicon, depth: int = DEFAULT_DEPTH) -> tuple[MTerm, ...]:
    """Every well-typed term with application nesting at most ``depth``, canonically ordered."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    entries = lex.sorted_entries()
    terms: list[MTerm] = [Atom(e) for e in entries]
    heads = [e for e in entries if e.arity >= 1]
    ext = {t: t.entry.universe for t in terms}
    known = set(terms)
    for _ in range(depth):
        by_universe: dict[str, list[MTerm]] = {}
        for t in terms:
            by_universe.setdefault(ext[t], []).append(t)
        fresh = []
        for head in heads:
            for rule in _rules_with_head(lex, head):
                pools = [by_universe.get(u, []) for u in rule.arg_universes]
                for args in itertools.product(*pools):
                    t = App(Atom(head), args)
                    if t in known:
                        continue
                    try:
                        check_cu_elim(t, lex)
                    except CheckFailure:
                        continue
                    known.add(t)
                    ext[t] = rule.external_universe
                    fresh.append(t)
        if not fresh:
            break
        terms.extend(fresh)
    return tuple(sorted(terms, key=term_key))


def _rules_with_head(lex: Lexicon, head: LexEntry):
    seen = set()
    for r in lex.head_rules:
        if r.head_universe == head.universe and len(r.arg_universes) == head.arity and r.signature not in seen:
            seen.add(r.signature)
            yield r


@dataclass(frozen=True)
class Counterexample:
    term: MTerm
    position: int
    direction: str  # "forward": suitable position lacks a restriction; "backward": restriction out of range

    @property
    def arrow(self) -> str:
        return "->" if self.direction == "forward" else "<-"


@dataclass(frozen=True)
class TermVerdict:
    term: MTerm
    arity: int
    verdicts: tuple[tuple[int, bool, bool], ...]  # (position, in range, predicate holds)

    @property
    def holds(self) -> bool:
        return all(lhs == rhs for _, lhs, rhs in self.verdicts)


@dataclass(frozen=True)
class AuditAnswer:
    holds: bool
    violators: tuple = ()


@dataclass(frozen=True)
class TheoremReport:
    depth: int
    max_position: int
    checked: tuple[TermVerdict, ...]
    counterexamples: tuple[Counterexample, ...]
    q1: AuditAnswer
    q2: AuditAnswer
    note: str = field(
        default="position bound is 1 <= y <= ar(x), the arity of the term itself",
    )

    @property
    def holds(self) -> bool:
        return not self.counterexamples


def verify_projection_theorem(
    lex: Lexicon,
    depth: int = DEFAULT_DEPTH,
    predicate: Optional[Callable[[Optional[str]], bool]] = None,
) -> TheoremReport:
    """Check ``1 <= y <= ar(x)  <->  p(s(x)(y))`` for every fragment term ``x``.

    Positions run over ``1..max_arity + 1``; beyond that the restriction
    lookup is structurally absent, so one position past the cap covers the rest.
    """
    declared = lex.restriction_ids
    if predicate is None:
        def predicate(r):
            return p_holds(r, declared)
    max_position = lex.max_arity + 1
    checked, counter = [], []
    for x in enumerate_fragment(lex, depth):
        ar = arity_of(x)
        rows = []
        for y in range(1, max_position + 1):
            lhs = 1 <= y <= ar
            rhs = bool(predicate(restriction_at(x, y)))
            rows.append((y, lhs, rhs))
            if lhs and not rhs:
                counter.append(Counterexample(x, y, "forward"))
            elif rhs and not lhs:
                counter.append(Counterexample(x, y, "backward"))
        checked.append(TermVerdict(x, ar, tuple(rows)))
    q1, q2 = audit_questions(lex)
    return TheoremReport(depth, max_position, tuple(checked), tuple(counter), q1, q2)


def audit_questions(lex: Lexicon) -> tuple[AuditAnswer, AuditAnswer]:
    """Q1: does every entry of arity >= 1 impose some restriction?
    Q2: does every restricting entry restrict all its positions?

    Q1 violators are entries; Q2 violators are ``(entry, missing position)`` pairs.
    """
    entries = lex.sorted_entries()
    q1 = tuple(e for e in entries if e.arity >= 1 and not e.signature)
    q2 = tuple(
        (e, pos)
        for e in entries if e.signature
        for pos in range(1, e.arity + 1) if e.restriction(pos) is None
    )
    return AuditAnswer(not q1, q1), AuditAnswer(not q2, q2)
