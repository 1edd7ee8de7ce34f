"""Read code parsing and hierarchy helpers.

A Read code is 7 characters: five hierarchy positions, where ``.`` pads
unused trailing levels, followed by a two character term suffix::

    N24..00   level 3   Other soft tissue disorders
    N245.16   level 4   Leg pain
    N245111   level 5   Toe pain
"""
from __future__ import annotations

import csv
from pathlib import Path

from .errors import (EmptyLevel1, FileError, InvalidCharacter, InvalidLength,
                     InvalidPadding, SchemaError)

CODE_LENGTH = 7
HIERARCHY_LENGTH = 5


class Readcode(str):
    """A validated 7-character Read code.

    Behaves as a plain string (hashing, ordering, formatting) so it can be
    used directly as a dictionary key or matrix column label.
    """

    __slots__ = ()

    def __new__(cls, text):
        if isinstance(text, Readcode):
            return text
        _validate(text)
        return super().__new__(cls, text)

    @property
    def level(self) -> int:
        return code_level(self)

    @property
    def hierarchy(self) -> str:
        return self[:HIERARCHY_LENGTH]

    @property
    def term(self) -> str:
        return self[HIERARCHY_LENGTH:]

    def __repr__(self):
        return f"Readcode({str.__repr__(self)})"


def _validate(text):
    if not isinstance(text, str):
        raise InvalidLength(f"Read code must be a string, got {type(text).__name__}")
    if len(text) != CODE_LENGTH:
        raise InvalidLength(f"Read code {text!r} has length {len(text)}, expected {CODE_LENGTH}")
    if text[0] == ".":
        raise EmptyLevel1(f"Read code {text!r} has no level-1 character")
    for ch in text:
        if ch != "." and not (ch.isascii() and ch.isalnum()):
            raise InvalidCharacter(f"Read code {text!r} contains invalid character {ch!r}")
    hierarchy = text[:HIERARCHY_LENGTH]
    first_dot = hierarchy.find(".")
    if first_dot >= 0 and hierarchy[first_dot:] != "." * (HIERARCHY_LENGTH - first_dot):
        raise InvalidPadding(f"Read code {text!r} has a non-trailing '.'")
    if "." in text[HIERARCHY_LENGTH:]:
        raise InvalidPadding(f"Read code {text!r} has '.' in its term suffix")


def parse_readcode(text: str) -> Readcode:
    """Validate ``text`` and return it as a :class:`Readcode`.

    Raises InvalidLength, InvalidPadding or EmptyLevel1 (all subclasses of
    ReadcodeError). No normalisation is applied: case and suffix are kept.
    """
    return Readcode(text)


def code_level(code: str) -> int:
    """Number of non-padding characters among the five hierarchy positions."""
    return sum(1 for ch in code[:HIERARCHY_LENGTH] if ch != ".")


def truncate_to_level3(code: str) -> Readcode:
    """Collapse a code onto its level-3 ancestor, e.g. ``N245.16 -> N24..00``."""
    code = Readcode(code)
    return Readcode(code[:3] + ".." + "00")


def load_dictionary(path) -> dict[str, str]:
    """Read an optional ``readcode,description`` CSV used to decorate reports."""
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot open dictionary {path}: {exc}") from exc
    out = {}
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["readcode", "description"]:
            raise SchemaError("expected header 'readcode,description'", path, 1)
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise SchemaError("expected 2 fields", path, rowno)
            try:
                code = parse_readcode(row[0].strip())
            except ValueError as exc:
                raise SchemaError(str(exc), path, rowno) from exc
            out[code] = row[1].strip()
    return out
