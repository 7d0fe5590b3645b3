import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from piecat.core import validate_category
from piecat.dsl import (
    DSLError,
    DSLSyntaxError,
    LawError,
    LexError,
    ResolutionError,
    Workspace,
    parse,
    print_workspace,
    quote,
    tokenize,
)
from piecat.harness.generate import random_workspace

from .conftest import corpus_files, load_corpus

GOLDEN = Path(__file__).parent / "golden"


def round_trip(text: str) -> tuple[str, str]:
    once = print_workspace(parse(text))
    twice = print_workspace(parse(once))
    return once, twice


# ---------------------------------------------------------------- samples


def test_terminal_sample():
    ws = load_corpus("terminal")
    assert list(ws.categories) == ["terminal"]
    assert ws.categories["terminal"].objects == ("T",)
    assert validate_category(ws.categories["terminal"])


def test_terminal_golden_file():
    assert print_workspace(load_corpus("terminal")) == (GOLDEN / "terminal.cat").read_text(encoding="utf-8")


def test_empty_workspace_prints_as_empty_document():
    assert print_workspace(Workspace()) == ""
    assert print_workspace(parse("# nothing here\n\n")) == ""


def test_corpus_is_large_enough():
    assert len(corpus_files()) >= 20


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_corpus_round_trip(path):
    text = path.read_text(encoding="utf-8")
    once, twice = round_trip(text)
    assert once == twice
    assert parse(text).structurally_equal(parse(once))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100)
def test_generated_workspaces_round_trip(seed):
    ws = random_workspace(random.Random(seed))
    text = print_workspace(ws)
    back = parse(text)
    assert back.structurally_equal(ws)
    assert print_workspace(back) == text


@given(st.text(min_size=0, max_size=12))
def test_any_identifier_survives_quoting(name):
    toks = tokenize(quote(name))
    assert (toks[0].kind, toks[0].text) == ("id", name)
    assert toks[1].kind == "eof"


# ------------------------------------------------------------ diagnostics


@pytest.mark.parametrize(
    "text, cls, line, column",
    [
        ("category K { objects A $ }", LexError, 1, 24),
        ("category K { objects A", DSLSyntaxError, 1, 23),
        ("category K { objects A; hom A B = f }", ResolutionError, 1, 31),
        ("category K { objects A; hom A A = f; compose f f = ghost }", ResolutionError, 1, 52),
        ("category K { objects A }\ncategory K { objects B }", ResolutionError, 2, 1),
        (
            "category K { objects A; hom A A = f; compose f f = id_A }\n"
            "concrete K { carrier A = {a b}; action f = a->a, b->a }",
            LawError,
            2,
            1,
        ),
    ],
)
def test_error_classes_and_positions(text, cls, line, column):
    with pytest.raises(cls) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_dangling_entry_is_named():
    with pytest.raises(ResolutionError, match="ghost"):
        parse("category K { objects A; hom A A = f; compose f f = ghost }")


def test_syntax_error_lists_expected_tokens():
    with pytest.raises(DSLSyntaxError) as info:
        parse("category K { objects A")
    assert "}" in info.value.expected


def test_non_associative_table_is_a_law_error():
    text = (
        "category M { objects s; hom s s = x y\n"
        "compose x x = x; compose x y = y; compose y x = x; compose y y = x }"
    )
    with pytest.raises(LawError):
        parse(text)


def test_hom_cap_is_enforced_at_parse_time():
    text = "category K { objects A B; hom A B = f g h }"
    assert parse(text, hom_cap=3)
    with pytest.raises(LawError, match="cap"):
        parse(text, hom_cap=2)


@given(st.text(max_size=60))
@settings(max_examples=300)
def test_parsing_is_total(text):
    try:
        parse(text)
    except DSLError as exc:
        assert exc.line >= 0 and exc.column >= 0
