"""Reading and writing sentence, bracket and selection files.

* sentence files: one sentence per line, tokens written ``surface_LABEL``;
* bracket files: one line per sentence, spans written ``(i j)``;
* selection files: one line per sentence, the index of the analysis to keep
  (or ``-`` to leave it unpinned).
"""

from __future__ import annotations

import re
from typing import Iterable

from .tokens import format_sentence, parse_sentence

__all__ = [
    "read_sentences",
    "write_sentences",
    "parse_bracket_line",
    "format_brackets",
    "read_brackets",
    "write_brackets",
    "read_selection",
]

_SPAN = re.compile(r"\(\s*(-?\d+)\s+(-?\d+)\s*\)")


def read_sentences(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [parse_sentence(line) for line in fh if line.strip()]


def write_sentences(sentences: Iterable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(format_sentence(s) + "\n")


def parse_bracket_line(line: str) -> frozenset:
    rest = _SPAN.sub("", line).strip()
    if rest:
        raise ValueError(f"unexpected text in bracket line: {rest!r}")
    return frozenset((int(i), int(j)) for i, j in _SPAN.findall(line))


def format_brackets(spans) -> str:
    return " ".join(f"({i} {j})" for i, j in sorted(spans))


def read_brackets(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [parse_bracket_line(line) for line in fh.read().splitlines()]


def write_brackets(bracket_sets: Iterable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for b in bracket_sets:
            fh.write(format_brackets(b) + "\n")


def read_selection(path) -> list:
    out: list = []
    with open(path, encoding="utf-8") as fh:
        for line in fh.read().splitlines():
            line = line.strip()
            out.append(None if line in ("", "-") else int(line))
    return out
