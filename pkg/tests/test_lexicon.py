import pytest
from conftest import REPO, all_fixture_paths

from zcheck.core import LexEntry, make_entry
from zcheck.lexicon import (
    Lexicon,
    LexiconError,
    load_lexicon,
    read_lexicon,
    seed_lexicon,
    seed_text,
    serialize_lexicon,
    validate_lexicon,
)

HEADER = '''restriction Phy : "physical entity"
universe A : "adjective"
universe X : "core argument (from XP)"
'''


def errors_of(text):
    with pytest.raises(LexiconError) as info:
        load_lexicon(text)
    return info.value.errors


def test_restriction_declaration():
    lex = load_lexicon('restriction Phy : "physical entity"\n')
    assert lex.restriction("Phy").gloss == "physical entity"
    assert lex.restriction_ids == {"Phy"}


def test_empty_input():
    lex = load_lexicon("")
    assert lex == Lexicon()
    assert not lex.entries and not lex.restrictions and not lex.universes and not lex.head_rules


def test_comments_and_blank_lines():
    lex = load_lexicon('# a comment\n\nrestriction Phy : "has # inside"  # trailing\n')
    assert lex.restriction("Phy").gloss == "has # inside"


def test_dangling_restriction_reference_is_located():
    text = HEADER + 'entry "red" : A / arity 1 / restricts 1 -> Qux\n'
    (err,) = errors_of(text)
    assert err.line == 4
    assert "Qux" in err.message
    assert text.splitlines()[3][err.column - 1:].startswith("Qux")


def test_entry_clauses():
    lex = load_lexicon(HEADER + 'entry "car" : X / arity 0 / satisfies {Phy}\n'
                                'entry "red" : A / arity 1 / restricts 1 -> Phy\n'
                                'headrule 20 : A ( X ) => X\n')
    assert lex.entry("car") == make_entry("car", "X", 0, satisfies={"Phy"})
    assert lex.entry("red").restriction(1) == "Phy"
    (rule,) = lex.head_rules
    assert (rule.precedence, rule.head_universe, rule.arg_universes, rule.external_universe) == (20, "A", ("X",), "X")


@pytest.mark.parametrize("line", [
    "restriction Phy",
    'entry "red" : A',
    'entry "red" : A / arity one',
    'entry "red" : A / arity 1 / restricts 1 Phy',
    "headrule x : A ( X ) => X",
    "frobnicate",
    "option max_arity",
])
def test_syntax_errors(line):
    (err,) = errors_of(HEADER + line + "\n")
    assert err.line == 4
    assert "syntax error" in err.message


def test_multiple_errors_all_reported():
    errs = errors_of(HEADER + 'entry "a" : Q / arity 0\nentry "b" : X / arity 0 / satisfies {Zed}\nbogus\n')
    assert [e.line for e in errs] == [4, 5, 6]


@pytest.mark.parametrize("text,invariant", [
    ('restriction Phy : "again"\n', "duplicate"),
    ('universe A : "again"\n', "duplicate"),
    ('universe Phy : "clash"\n', "namespace"),
    ('entry "red" : A / arity 1\nentry "red" : A / arity 1\n', "duplicate"),
    ('entry "car" : X / arity 0 / restricts 1 -> Phy\n', "signature"),
    ('entry "red" : A / arity 1 / restricts 2 -> Phy\n', "signature"),
    ('entry "big" : A / arity 15\n', "arity-cap"),
    ('headrule 1 : A ( Q ) => X\n', "dangling-reference"),
    ('headrule 1 : A ( X ) => X\nheadrule 2 : A ( X ) => X\n', "headrule-conflict"),
    ('universe_satisfies Q {Phy}\n', "dangling-reference"),
])
def test_validation_violations(text, invariant):
    parsed = read_lexicon(HEADER + text)
    assert not parsed.errors
    report = validate_lexicon(parsed.lexicon)
    assert len(report) == 1
    assert report.violations[0].invariant == invariant


def test_arity0_with_signature_is_one_violation():
    lex = Lexicon(entries=(LexEntry("car", "X", 0, ((1, "Phy"),), frozenset()),))
    report = validate_lexicon(lex.replace(
        restrictions=seed_lexicon().restrictions, universes=seed_lexicon().universes))
    assert [v.invariant for v in report] == ["signature"]


def test_arity_cap_is_configurable():
    text = HEADER + 'entry "big" : A / arity 15\n'
    assert load_lexicon("option max_arity 20\n" + text).max_arity == 20
    (err,) = errors_of("option max_arity 2\n" + HEADER + 'entry "big" : A / arity 3\n')
    assert "max_arity 2" in err.message


def test_seed_is_valid(seed):
    assert validate_lexicon(seed).ok
    assert {r.id for r in seed.restrictions} == {"Phy", "Inf", "Ani", "Sen", "Cou", "Mas"}
    assert {"A", "ACC", "ADL", "ADP", "X"} <= seed.universe_ids
    assert sorted(e.surface for e in seed.entries) == sorted(
        ["red", "car", "work", "-s", "heavy", "rain", "john", "sleeps"])


def test_repo_seed_matches_packaged_seed():
    assert (REPO / "seed.zlex").read_text(encoding="utf-8") == seed_text()


def test_loading_is_deterministic():
    assert load_lexicon(seed_text()) == load_lexicon(seed_text())


def test_equality_ignores_declaration_order(seed):
    shuffled = seed.replace(entries=tuple(reversed(seed.entries)),
                            restrictions=tuple(reversed(seed.restrictions)))
    assert shuffled == seed
    assert shuffled != seed.replace(max_arity=3)


def test_error_removal_eliminates_error():
    text = HEADER + 'entry "red" : A / arity 1 / restricts 1 -> Qux\nentry "car" : X / arity 0\n'
    (err,) = errors_of(text)
    lines = text.splitlines(keepends=True)
    del lines[err.line - 1]
    load_lexicon("".join(lines))


@pytest.mark.parametrize("path", all_fixture_paths(), ids=lambda p: p.name)
def test_round_trip(path):
    lex = load_lexicon(path.read_text(encoding="utf-8"))
    once = serialize_lexicon(lex)
    assert load_lexicon(once) == lex
    assert serialize_lexicon(load_lexicon(once)) == once


def test_serialization_is_sorted_by_kind_then_id(seed):
    lines = serialize_lexicon(seed).splitlines()
    kinds = [line.split()[0] for line in lines]
    order = ["restriction", "universe", "entry", "headrule"]
    assert kinds == sorted(kinds, key=order.index)
    ids = [line.split()[1] for line in lines if line.startswith("restriction")]
    assert ids == sorted(ids)


def test_glosses_with_quotes_round_trip():
    lex = load_lexicon('restriction Q : "say \\"hi\\" \\\\ bye"\n')
    assert lex.restriction("Q").gloss == 'say "hi" \\ bye'
    assert load_lexicon(serialize_lexicon(lex)) == lex
