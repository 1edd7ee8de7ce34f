import pytest
from hypothesis import given
from hypothesis import strategies as st

from pemsignal.errors import (EmptyLevel1, InvalidCharacter, InvalidLength, InvalidPadding,
                              SchemaError)
from pemsignal.readcode import (Readcode, code_level, load_dictionary, parse_readcode,
                                truncate_to_level3)

_CH = st.sampled_from("ABCJN0123456789abz")


@st.composite
def readcodes(draw):
    level = draw(st.integers(1, 5))
    head = "".join(draw(_CH) for _ in range(level))
    suffix = draw(st.sampled_from(["00", "11", "16", "17", "zz"]))
    return Readcode(head + "." * (5 - level) + suffix)


@pytest.mark.parametrize("text,level", [
    ("N245.16", 4), ("N24..00", 3), ("C10F.00", 4), ("J046.00", 4),
    ("A....00", 1), ("N245111", 5), ("1Z12.00", 4),
])
def test_parse_and_level(text, level):
    code = parse_readcode(text)
    assert code == text
    assert code_level(code) == level
    assert code.level == level


@pytest.mark.parametrize("text,exc", [
    ("N2.4.00", InvalidPadding),
    ("N24.1.00", InvalidLength),
    ("N24", InvalidLength),
    ("", InvalidLength),
    (".N24.00", EmptyLevel1),
    ("N24..0.", InvalidPadding),
    ("N24 .00", InvalidCharacter),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_readcode(text)


def test_parse_does_not_normalise():
    assert parse_readcode("n245.16") == "n245.16"


@pytest.mark.parametrize("text,expected", [
    ("C10F.00", "C10..00"),
    ("N245.16", "N24..00"),
    ("N24..00", "N24..00"),
    ("N245111", "N24..00"),
    ("J046.00", "J04..00"),
    ("A....00", "A....00"),
    ("AB...12", "AB...00"),
])
def test_truncate_to_level3(text, expected):
    assert truncate_to_level3(text) == expected


@given(readcodes())
def test_truncate_idempotent_and_shallow(code):
    once = truncate_to_level3(code)
    assert truncate_to_level3(once) == once
    assert code_level(once) <= 3
    assert code_level(once) == min(code_level(code), 3)


@given(readcodes(), readcodes())
def test_same_parent_iff_same_prefix(a, b):
    assert (truncate_to_level3(a) == truncate_to_level3(b)) == (a[:3] == b[:3])


def test_readcode_is_a_string():
    code = Readcode("N245.16")
    assert isinstance(code, str)
    assert {code: 1}["N245.16"] == 1
    assert code.hierarchy == "N245." and code.term == "16"


def test_load_dictionary(tmp_path):
    path = tmp_path / "dict.csv"
    path.write_text("readcode,description\nN245.16,Leg pain\nN24..00,Other soft tissue disorders\n")
    assert load_dictionary(path) == {"N245.16": "Leg pain",
                                     "N24..00": "Other soft tissue disorders"}
    path.write_text("readcode,description\nN2.4.00,bad\n")
    with pytest.raises(SchemaError, match="row 2"):
        load_dictionary(path)
