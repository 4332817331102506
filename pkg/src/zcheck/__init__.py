"""Lexicon-driven parser and type checker for selectional restrictions."""

from .core import (
    App,
    Atom,
    ElementaryUniverse,
    LexEntry,
    MTerm,
    Restriction,
    arity_of,
    order_of,
    p_holds,
    restriction_at,
)
from .lexicon import (
    HeadRule,
    Lexicon,
    LexiconError,
    load_lexicon,
    seed_lexicon,
    serialize_lexicon,
    validate_lexicon,
)
from .parser import ParseError, parse, parse_bracketed
from .checker import (
    CheckFailure,
    Derivation,
    FailureKind,
    Rule,
    audit_questions,
    check_cu_elim,
    check_cu_form,
    check_eu_form,
    check_map,
    check_term,
    enumerate_fragment,
    verify_projection_theorem,
)

__all__ = [
    "App", "Atom", "ElementaryUniverse", "LexEntry", "MTerm", "Restriction",
    "arity_of", "order_of", "p_holds", "restriction_at",
    "HeadRule", "Lexicon", "LexiconError", "load_lexicon", "seed_lexicon",
    "serialize_lexicon", "validate_lexicon",
    "ParseError", "parse", "parse_bracketed",
    "CheckFailure", "Derivation", "FailureKind", "Rule", "audit_questions",
    "check_cu_elim", "check_cu_form", "check_eu_form", "check_map", "check_term",
    "enumerate_fragment", "verify_projection_theorem",
]
