"""Declarative lexicon files: restrictions, universes, entries and head rules.

One declaration per line, ``#`` starts a comment::

    restriction Phy : "physical entity"
    universe A : "adjective"
    entry "red" : A / arity 1 / restricts 1 -> Phy
    entry "car" : X / arity 0 / satisfies {Phy, Cou}
    headrule 20 : A ( X ) => X
    universe_satisfies X {Phy}
    option max_arity 14
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .core import (
    DEFAULT_MAX_ARITY,
    RESTRICTION_ID,
    UNIVERSE_ID,
    ElementaryUniverse,
    LexEntry,
    Restriction,
)

SURFACE = re.compile(r'[^\s()"\\#]+\Z')


@dataclass(frozen=True)
class HeadRule:
    precedence: int
    head_universe: str
    arg_universes: tuple[str, ...]
    external_universe: str

    def __post_init__(self):
        object.__setattr__(self, "arg_universes", tuple(self.arg_universes))

    @property
    def signature(self) -> tuple[str, tuple[str, ...]]:
        return self.head_universe, self.arg_universes

    def __str__(self):
        return f"{self.head_universe}({','.join(self.arg_universes)})=>{self.external_universe}"


@dataclass(frozen=True)
class UniverseSatisfies:
    """Default restriction memberships of complex terms exposing ``universe``."""

    universe: str
    restrictions: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "restrictions", frozenset(self.restrictions))


@dataclass(frozen=True, eq=False)
class Lexicon:
    """Declarations in source order.

    Equality ignores declaration order. Lookup tables keep the first
    declaration of each key; duplicates are reported by :func:`validate_lexicon`.
    """

    restrictions: tuple[Restriction, ...] = ()
    universes: tuple[ElementaryUniverse, ...] = ()
    entries: tuple[LexEntry, ...] = ()
    head_rules: tuple[HeadRule, ...] = ()
    universe_satisfies: tuple[UniverseSatisfies, ...] = ()
    max_arity: int = DEFAULT_MAX_ARITY
    _restriction_map: dict = field(init=False, repr=False)
    _universe_map: dict = field(init=False, repr=False)
    _entry_map: dict = field(init=False, repr=False)
    _defaults_map: dict = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("restrictions", "universes", "entries", "head_rules", "universe_satisfies"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "_restriction_map", _first_by(self.restrictions, "id"))
        object.__setattr__(self, "_universe_map", _first_by(self.universes, "id"))
        object.__setattr__(self, "_entry_map", _first_by(self.entries, "surface"))
        object.__setattr__(self, "_defaults_map", _first_by(self.universe_satisfies, "universe"))

    def _canonical(self):
        return (
            sorted(self.restrictions, key=lambda r: (r.id, r.gloss)),
            sorted(self.universes, key=lambda u: (u.id, u.gloss)),
            sorted(self.entries, key=_entry_sort_key),
            sorted(self.head_rules, key=_rule_sort_key),
            sorted(self.universe_satisfies, key=lambda d: (d.universe, sorted(d.restrictions))),
            self.max_arity,
        )

    def __eq__(self, other):
        if not isinstance(other, Lexicon):
            return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self):
        return hash(repr(self._canonical()))

    @property
    def restriction_ids(self) -> frozenset[str]:
        return frozenset(self._restriction_map)

    @property
    def universe_ids(self) -> frozenset[str]:
        return frozenset(self._universe_map)

    def entry(self, surface: str) -> Optional[LexEntry]:
        return self._entry_map.get(surface)

    def restriction(self, rid: str) -> Optional[Restriction]:
        return self._restriction_map.get(rid)

    def universe(self, uid: str) -> Optional[ElementaryUniverse]:
        return self._universe_map.get(uid)

    def universe_defaults(self, uid: str) -> Optional[frozenset[str]]:
        decl = self._defaults_map.get(uid)
        return None if decl is None else decl.restrictions

    def rules_for(self, head_universe: str, arg_universes: tuple[str, ...]) -> list[HeadRule]:
        return [
            r for r in self.head_rules
            if r.head_universe == head_universe and r.arg_universes == tuple(arg_universes)
        ]

    def sorted_entries(self) -> list[LexEntry]:
        return sorted(self._entry_map.values(), key=lambda e: e.surface)

    def replace(self, **changes) -> "Lexicon":
        fields = dict(
            restrictions=self.restrictions,
            universes=self.universes,
            entries=self.entries,
            head_rules=self.head_rules,
            universe_satisfies=self.universe_satisfies,
            max_arity=self.max_arity,
        )
        fields.update(changes)
        return Lexicon(**fields)


def _first_by(items, attr):
    table = {}
    for item in items:
        table.setdefault(getattr(item, attr), item)
    return table


def _entry_sort_key(e: LexEntry):
    return (e.surface, e.universe, e.arity, e.signature, sorted(e.satisfies))


def _rule_sort_key(r: HeadRule):
    return (-r.precedence, r.head_universe, r.arg_universes, r.external_universe)


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One broken invariant.

    ``kind`` and ``index`` locate the offending declaration in the lexicon's
    tuples; ``token`` is the identifier the message is about, if any.
    """

    invariant: str
    kind: str
    index: int
    message: str
    token: Optional[str] = None

    def __str__(self):
        return f"{self.invariant}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def __iter__(self):
        return iter(self.violations)

    def __len__(self):
        return len(self.violations)


def validate_lexicon(lex: Lexicon) -> ValidationReport:
    out: list[Violation] = []

    def bad(invariant, kind, index, message, token=None):
        out.append(Violation(invariant, kind, index, message, token))

    if lex.max_arity < 0:
        bad("max-arity", "option", 0, f"max_arity must be non-negative, got {lex.max_arity}")

    seen: set[str] = set()
    for i, r in enumerate(lex.restrictions):
        if not RESTRICTION_ID.match(r.id):
            bad("restriction-id", "restriction", i, f"malformed restriction id {r.id!r}", r.id)
        if r.id in seen:
            bad("duplicate", "restriction", i, f"restriction {r.id} declared twice", r.id)
        seen.add(r.id)

    restriction_ids = lex.restriction_ids
    seen = set()
    for i, u in enumerate(lex.universes):
        if not UNIVERSE_ID.match(u.id):
            bad("universe-id", "universe", i, f"malformed universe id {u.id!r}", u.id)
        if u.id in seen:
            bad("duplicate", "universe", i, f"universe {u.id} declared twice", u.id)
        if u.id in restriction_ids:
            bad("namespace", "universe", i, f"{u.id} is declared both as universe and restriction", u.id)
        seen.add(u.id)

    universe_ids = lex.universe_ids
    seen = set()
    for i, e in enumerate(lex.entries):
        label = f'entry "{e.surface}"'
        if not SURFACE.match(e.surface):
            bad("surface", "entry", i, f"malformed surface form {e.surface!r}", e.surface)
        if e.surface in seen:
            bad("duplicate", "entry", i, f"{label} declared twice", e.surface)
        seen.add(e.surface)
        if e.universe not in universe_ids:
            bad("dangling-reference", "entry", i, f"{label}: undeclared universe {e.universe}", e.universe)
        if e.arity < 0:
            bad("arity", "entry", i, f"{label}: negative arity {e.arity}")
        elif e.arity > lex.max_arity:
            bad("arity-cap", "entry", i, f"{label}: arity {e.arity} exceeds max_arity {lex.max_arity}")
        positions = e.restricted_positions
        if e.arity == 0 and positions:
            bad("signature", "entry", i, f"{label}: arity 0 entry has a nonempty signature")
        else:
            for pos in positions:
                if not 1 <= pos <= e.arity:
                    bad("signature", "entry", i, f"{label}: position {pos} outside 1..{e.arity}", str(pos))
        for pos in sorted({p for p in positions if positions.count(p) > 1}):
            bad("signature", "entry", i, f"{label}: position {pos} restricted twice", str(pos))
        for _, rid in e.signature:
            if rid not in restriction_ids:
                bad("dangling-reference", "entry", i, f"{label}: undeclared restriction {rid}", rid)
        for rid in sorted(e.satisfies):
            if rid not in restriction_ids:
                bad("dangling-reference", "entry", i, f"{label}: undeclared restriction {rid}", rid)

    rules_seen: dict[tuple, HeadRule] = {}
    for i, rule in enumerate(lex.head_rules):
        if not rule.arg_universes:
            bad("headrule", "headrule", i, f"head rule {rule} has no argument universes")
        for uid in (rule.head_universe, *rule.arg_universes, rule.external_universe):
            if uid not in universe_ids:
                bad("dangling-reference", "headrule", i, f"head rule {rule}: undeclared universe {uid}", uid)
        prior = rules_seen.get(rule.signature)
        if prior is not None:
            if prior == rule:
                bad("duplicate", "headrule", i, f"head rule {rule} declared twice")
            else:
                bad("headrule-conflict", "headrule", i,
                    f"head rule {rule} conflicts with {prior} (precedence {prior.precedence})")
        else:
            rules_seen[rule.signature] = rule

    seen = set()
    for i, d in enumerate(lex.universe_satisfies):
        if d.universe not in universe_ids:
            bad("dangling-reference", "universe_satisfies", i, f"undeclared universe {d.universe}", d.universe)
        if d.universe in seen:
            bad("duplicate", "universe_satisfies", i, f"universe_satisfies {d.universe} declared twice", d.universe)
        seen.add(d.universe)
        for rid in sorted(d.restrictions):
            if rid not in restriction_ids:
                bad("dangling-reference", "universe_satisfies", i, f"undeclared restriction {rid}", rid)

    return ValidationReport(tuple(out))


# -- text format --------------------------------------------------------------

@dataclass(frozen=True)
class LexError:
    line: int
    column: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"


class LexiconError(Exception):
    def __init__(self, errors: list[LexError], source: str = "<lexicon>"):
        self.errors = list(errors)
        self.source = source
        super().__init__("\n".join(f"{source}:{e}" for e in self.errors))


_QUOTED = r'"((?:[^"\\]|\\.)*)"'
_RE_RESTRICTION = re.compile(rf"restriction\s+(\S+)\s*:\s*{_QUOTED}\Z")
_RE_UNIVERSE = re.compile(rf"universe\s+(\S+)\s*:\s*{_QUOTED}\Z")
_RE_ENTRY_HEAD = re.compile(rf"entry\s+{_QUOTED}\s*:\s*(\S+)\Z")
_RE_ARITY = re.compile(r"arity\s+(\d+)\Z")
_RE_RESTRICTS = re.compile(r"restricts\s+(.+)\Z")
_RE_POS = re.compile(r"(\d+)\s*->\s*(\S+)\Z")
_RE_SATISFIES = re.compile(r"satisfies\s*\{(.*)\}\Z")
_RE_HEADRULE = re.compile(r"headrule\s+(-?\d+)\s*:\s*([^\s(]+)\s*\((.*)\)\s*=>\s*(\S+)\Z")
_RE_DEFAULTS = re.compile(r"universe_satisfies\s+(\S+)\s*\{(.*)\}\Z")
_RE_OPTION = re.compile(r"option\s+max_arity\s+(\d+)\Z")


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _strip_comment(line: str) -> str:
    in_quote = escaped = False
    for i, ch in enumerate(line):
        if escaped:
            escaped = False
        elif ch == "\\" and in_quote:
            escaped = True
        elif ch == '"':
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i]
    return line


def _id_list(body: str) -> list[str]:
    items = [x.strip() for x in body.split(",")]
    if items == [""]:
        return []
    if any(not x or re.search(r"\s", x) for x in items):
        raise ValueError("malformed identifier list")
    return items


def _parse_entry(line: str) -> LexEntry:
    parts = [p.strip() for p in _split_outside_quotes(line, "/")]
    m = _RE_ENTRY_HEAD.match(parts[0])
    if not m:
        raise ValueError('expected entry "<surface>" : <Universe>')
    surface, universe = _unquote(m.group(1)), m.group(2)
    arity = None
    signature: list[tuple[int, str]] = []
    satisfies: Optional[list[str]] = None
    for part in parts[1:]:
        if (a := _RE_ARITY.match(part)) and arity is None:
            arity = int(a.group(1))
        elif (r := _RE_RESTRICTS.match(part)) and not signature:
            for item in r.group(1).split(","):
                pm = _RE_POS.match(item.strip())
                if not pm:
                    raise ValueError(f"malformed restriction clause {item.strip()!r}")
                signature.append((int(pm.group(1)), pm.group(2)))
        elif (s := _RE_SATISFIES.match(part)) and satisfies is None:
            satisfies = _id_list(s.group(1))
        else:
            raise ValueError(f"unexpected entry clause {part!r}")
    if arity is None:
        raise ValueError("entry is missing its arity clause")
    return LexEntry(surface, universe, arity, tuple(signature), frozenset(satisfies or ()))


def _split_outside_quotes(line: str, sep: str) -> list[str]:
    parts, buf, in_quote, escaped = [], [], False, False
    for ch in line:
        if escaped:
            escaped = False
        elif ch == "\\" and in_quote:
            escaped = True
        elif ch == '"':
            in_quote = not in_quote
        elif ch == sep and not in_quote:
            parts.append("".join(buf))
            buf = []
            continue
        buf.append(ch)
    parts.append("".join(buf))
    return parts


@dataclass
class ParsedLexicon:
    """Result of reading lexicon text without validating it."""

    lexicon: Lexicon
    lines: dict[tuple[str, int], int]
    texts: dict[int, str]
    errors: list[LexError]

    def locate(self, v: Violation) -> LexError:
        line = self.lines.get((v.kind, v.index), 1)
        column = 1
        text = self.texts.get(line, "")
        if v.token:
            keyword_end = len(text) - len(text.lstrip()) + len(v.kind)
            found = text.find(v.token, keyword_end)
            if found >= 0:
                column = found + 1
        elif text:
            column = len(text) - len(text.lstrip()) + 1
        return LexError(line, column, str(v))


def read_lexicon(text: str) -> ParsedLexicon:
    """Parse declarations; syntax errors are collected, references are not checked."""
    decls: dict[str, list] = {k: [] for k in
                              ("restriction", "universe", "entry", "headrule", "universe_satisfies")}
    lines: dict[tuple[str, int], int] = {}
    texts: dict[int, str] = {}
    errors: list[LexError] = []
    max_arity = DEFAULT_MAX_ARITY
    option_line = None

    def add(kind, value, lineno):
        lines[(kind, len(decls[kind]))] = lineno
        decls[kind].append(value)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        texts[lineno] = raw
        line = _strip_comment(raw).strip()
        if not line:
            continue
        column = len(raw) - len(raw.lstrip()) + 1
        keyword = line.split(None, 1)[0]
        try:
            if keyword == "restriction":
                m = _RE_RESTRICTION.match(line)
                if not m:
                    raise ValueError('expected restriction <Id> : "<gloss>"')
                add("restriction", Restriction(m.group(1), _unquote(m.group(2))), lineno)
            elif keyword == "universe":
                m = _RE_UNIVERSE.match(line)
                if not m:
                    raise ValueError('expected universe <Id> : "<gloss>"')
                add("universe", ElementaryUniverse(m.group(1), _unquote(m.group(2))), lineno)
            elif keyword == "entry":
                add("entry", _parse_entry(line), lineno)
            elif keyword == "headrule":
                m = _RE_HEADRULE.match(line)
                if not m:
                    raise ValueError("expected headrule <precedence> : <U> ( <U>, ... ) => <U>")
                args = _id_list(m.group(3))
                add("headrule", HeadRule(int(m.group(1)), m.group(2), tuple(args), m.group(4)), lineno)
            elif keyword == "universe_satisfies":
                m = _RE_DEFAULTS.match(line)
                if not m:
                    raise ValueError("expected universe_satisfies <U> {<R>, ...}")
                add("universe_satisfies", UniverseSatisfies(m.group(1), frozenset(_id_list(m.group(2)))), lineno)
            elif keyword == "option":
                m = _RE_OPTION.match(line)
                if not m:
                    raise ValueError("expected option max_arity <n>")
                if option_line is not None:
                    raise ValueError(f"max_arity already set on line {option_line}")
                max_arity, option_line = int(m.group(1)), lineno
            else:
                raise ValueError(f"unknown declaration {keyword!r}")
        except ValueError as exc:
            errors.append(LexError(lineno, column, f"syntax error: {exc}"))

    if option_line is not None:
        lines[("option", 0)] = option_line
    lex = Lexicon(
        restrictions=tuple(decls["restriction"]),
        universes=tuple(decls["universe"]),
        entries=tuple(decls["entry"]),
        head_rules=tuple(decls["headrule"]),
        universe_satisfies=tuple(decls["universe_satisfies"]),
        max_arity=max_arity,
    )
    return ParsedLexicon(lex, lines, texts, errors)


def load_lexicon(text: str, source: str = "<lexicon>") -> Lexicon:
    """Parse and validate lexicon text; raise :class:`LexiconError` listing every problem."""
    parsed = read_lexicon(text)
    errors = list(parsed.errors)
    errors.extend(parsed.locate(v) for v in validate_lexicon(parsed.lexicon))
    if errors:
        errors.sort(key=lambda e: (e.line, e.column))
        raise LexiconError(errors, source)
    return parsed.lexicon


def load_lexicon_file(path: str | Path) -> Lexicon:
    path = Path(path)
    return load_lexicon(path.read_text(encoding="utf-8"), str(path))


def seed_text() -> str:
    return resources.files("zcheck.data").joinpath("seed.zlex").read_text(encoding="utf-8")


def seed_lexicon() -> Lexicon:
    return load_lexicon(seed_text(), "seed.zlex")


def _entry_line(e: LexEntry) -> str:
    parts = [f"entry {_quote(e.surface)} : {e.universe}", f"arity {e.arity}"]
    if e.signature:
        parts.append("restricts " + ", ".join(f"{p} -> {r}" for p, r in e.signature))
    if e.satisfies:
        parts.append("satisfies {" + ", ".join(sorted(e.satisfies)) + "}")
    return " / ".join(parts)


def serialize_lexicon(lex: Lexicon) -> str:
    """Canonical text: declarations grouped by kind, sorted by id within a kind."""
    restrictions, universes, entries, rules, defaults, max_arity = lex._canonical()
    out = []
    if max_arity != DEFAULT_MAX_ARITY:
        out.append(f"option max_arity {max_arity}")
    out += [f"restriction {r.id} : {_quote(r.gloss)}" for r in restrictions]
    out += [f"universe {u.id} : {_quote(u.gloss)}" for u in universes]
    out += [f"universe_satisfies {d.universe} {{{', '.join(sorted(d.restrictions))}}}" for d in defaults]
    out += [_entry_line(e) for e in entries]
    out += [
        f"headrule {r.precedence} : {r.head_universe} ( {', '.join(r.arg_universes)} ) => {r.external_universe}"
        for r in rules
    ]
    return "".join(line + "\n" for line in out)
