from __future__ import annotations

import pytest

from mlidl.idl import LexError, tokenize


def kinds(text):
    return [(t.kind, t.text) for t in tokenize(text)[:-1]]


def test_enum_line():
    toks = tokenize("CS_VREDRAW = 1,")
    assert [(t.kind, t.text) for t in toks[:-1]] == [
        ("ident", "CS_VREDRAW"), ("punct", "="), ("int", "1"), ("punct", ","),
    ]
    assert toks[2].value == 1


def test_empty_input():
    toks = tokenize("")
    assert len(toks) == 1 and toks[0].kind == "eof"


def test_word_literal_value():
    toks = tokenize("0wx80000000")
    assert toks[0].kind == "word"
    assert toks[0].value == 0x80000000
    assert toks[0].text == "0wx80000000"


def test_word_literal_too_wide():
    with pytest.raises(LexError):
        tokenize("0wx100000000")


def test_word_literal_needs_digits():
    with pytest.raises(LexError):
        tokenize("0wxzz")


def test_line_and_col_are_one_based():
    toks = tokenize("a\n  b")
    assert (toks[0].line, toks[0].col) == (1, 1)
    assert (toks[1].line, toks[1].col) == (2, 3)


def test_keywords_versus_idents():
    toks = tokenize("typedef wndclass")
    assert toks[0].kind == "keyword"
    assert toks[1].kind == "ident"


def test_comments_dropped():
    toks = tokenize("int x; // comment\n/* block\n comment */ int y;")
    assert [t.text for t in toks[:-1]] == ["int", "x", ";", "int", "y", ";"]


def test_unterminated_block_comment():
    with pytest.raises(LexError):
        tokenize("/* never closed")


def test_unterminated_string():
    with pytest.raises(LexError) as exc:
        tokenize('const char *X = "oops;')
    assert exc.value.line == 1


def test_string_value_and_text():
    toks = tokenize('"#32512"')
    assert toks[0].kind == "string"
    assert toks[0].value == "#32512"
    assert toks[0].text == '"#32512"'


def test_string_escapes():
    toks = tokenize(r'"a\"b\n"')
    assert toks[0].value == 'a"b\n'


def test_char_literal():
    toks = tokenize("'x'")
    assert toks[0].kind == "char" and toks[0].value == "x"


def test_stray_character_reports_position():
    with pytest.raises(LexError) as exc:
        tokenize("int $x;")
    assert "stray" in str(exc.value)
    assert exc.value.col == 5


def test_concatenation_recovers_non_comment_input():
    # joining token texts with spaces then re-lexing gives the same stream
    from conftest import read_idl

    toks = tokenize(read_idl("win32.idl"))
    rejoined = " ".join(t.text for t in toks[:-1])
    again = tokenize(rejoined)
    assert [(t.kind, t.text) for t in toks[:-1]] == \
           [(t.kind, t.text) for t in again[:-1]]
