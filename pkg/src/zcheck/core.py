"""Domain types of the relational type system and the pure functions over them."""

from __future__ import annotations

import re
from collections.abc import Collection, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Optional, Union

DEFAULT_MAX_ARITY = 14

RESTRICTION_ID = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
UNIVERSE_ID = re.compile(r"[A-Za-z][A-Za-z0-9_-]*\Z")


@dataclass(frozen=True)
class Restriction:
    """An element of the universe of selectional restrictions, e.g. ``Phy``."""

    id: str
    gloss: str = ""


@dataclass(frozen=True)
class ElementaryUniverse:
    """A basic morphosyntactic category such as ``A`` (adjective)."""

    id: str
    gloss: str = ""


@dataclass(frozen=True)
class LexEntry:
    """A morpheme.

    ``signature`` holds ``(position, restriction_id)`` pairs: the restrictions
    the entry imposes on its argument positions when used as a head.
    ``satisfies`` holds the restrictions it witnesses when used as an argument.
    """

    surface: str
    universe: str
    arity: int = 0
    signature: tuple[tuple[int, str], ...] = ()
    satisfies: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "signature", tuple(sorted(self.signature)))
        object.__setattr__(self, "satisfies", frozenset(self.satisfies))

    def restriction(self, position: int) -> Optional[str]:
        for pos, rid in self.signature:
            if pos == position:
                return rid
        return None

    @property
    def restricted_positions(self) -> tuple[int, ...]:
        return tuple(pos for pos, _ in self.signature)


@dataclass(frozen=True)
class Atom:
    entry: LexEntry
    order: int = field(default=0, init=False, compare=False)

    @property
    def surface(self) -> str:
        return self.entry.surface

    def __str__(self):
        return self.entry.surface


@dataclass(frozen=True)
class App:
    """A head morpheme applied to a full argument sequence: ``head(e1, ..., en)``."""

    head: Atom
    args: tuple[MTerm, ...]
    order: int = field(default=0, init=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.head, Atom):
            raise TypeError(f"head must be an Atom, got {self.head!r}")
        args = tuple(self.args)
        if not args:
            raise ValueError(f"{self.head.surface}: empty argument sequence")
        if len(args) != self.head.entry.arity:
            raise ValueError(
                f"{self.head.surface} has arity {self.head.entry.arity}, "
                f"applied to {len(args)} argument(s)"
            )
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "order", 1 + max(a.order for a in args))

    @property
    def surface(self) -> str:
        return self.head.surface

    def __str__(self):
        return f"{self.head}({','.join(str(a) for a in self.args)})"


MTerm = Union[Atom, App]


def order_of(t: MTerm) -> int:
    """Order computed bottom-up (ignores the cached field)."""
    match t:
        case Atom():
            return 0
        case App(args=args):
            return 1 + max(order_of(a) for a in args)
    raise TypeError(f"not a term: {t!r}")


def arity_of(t: MTerm) -> int:
    # fully applied terms have no open positions left
    if isinstance(t, Atom):
        return t.entry.arity
    return 0


def restriction_at(t: MTerm, y: int) -> Optional[str]:
    """The partial restriction function: the id imposed at position ``y``, or None."""
    if y < 1:
        raise ValueError("positions are 1-based")
    if isinstance(t, Atom):
        return t.entry.restriction(y)
    return None


def p_holds(r: Optional[str], declared: Collection[str]) -> bool:
    return r is not None and r in declared


def subterms(t: MTerm) -> Iterator[MTerm]:
    """Pre-order walk, including ``t`` itself and every head atom."""
    yield t
    if isinstance(t, App):
        yield t.head
        for a in t.args:
            yield from subterms(a)


def render(t: MTerm) -> str:
    return str(t)


def render_bracketed(t: MTerm) -> str:
    if isinstance(t, Atom):
        return t.surface
    return "(" + " ".join([t.head.surface, *(render_bracketed(a) for a in t.args)]) + ")"


def term_key(t: MTerm) -> tuple:
    """Canonical sort key: surface form, then arguments recursively."""
    if isinstance(t, Atom):
        return (t.surface, 0, ())
    return (t.head.surface, 1, tuple(term_key(a) for a in t.args))


def make_entry(
    surface: str,
    universe: str,
    arity: int = 0,
    signature: Mapping[int, str] | None = None,
    satisfies: Collection[str] = (),
) -> LexEntry:
    return LexEntry(surface, universe, arity, tuple((signature or {}).items()), frozenset(satisfies))
