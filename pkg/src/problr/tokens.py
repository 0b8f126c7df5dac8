"""Tagged tokens and bracket sets."""

from __future__ import annotations

from typing import Iterable, NamedTuple

__all__ = [
    "Token",
    "PUNCT_LABELS",
    "TERMINATORS",
    "parse_token",
    "parse_sentence",
    "format_sentence",
    "is_punct",
    "check_brackets",
    "crosses",
]

# comma, semicolon, colon, dash, open/close bracket, full stop, question, exclamation
PUNCT_LABELS = frozenset({"pco", "psc", "pcl", "pda", "pbo", "pbc", "pfs", "pqu", "pex"})
TERMINATORS = frozenset({"pfs", "pqu", "pex"})


class Token(NamedTuple):
    surface: str
    label: str

    def __str__(self):
        return f"{self.surface}_{self.label}"


def parse_token(text: str) -> Token:
    """Split ``surface_LABEL`` at the last underscore."""
    surface, sep, label = text.rpartition("_")
    if not sep or not surface or not label:
        raise ValueError(f"token {text!r} is not of the form surface_LABEL")
    return Token(surface, label)


def parse_sentence(line: str) -> tuple:
    return tuple(parse_token(t) for t in line.split())


def format_sentence(tokens: Iterable[Token]) -> str:
    return " ".join(map(str, tokens))


def is_punct(token: Token) -> bool:
    return token.label in PUNCT_LABELS


def crosses(a: tuple, b: tuple) -> bool:
    """True if spans ``a`` and ``b`` overlap without either containing the other."""
    (i, j), (k, l) = a, b
    return i < k < j < l or k < i < l < j


def check_brackets(brackets, n: int) -> frozenset:
    """Validate half-open spans over ``n`` tokens; they must be mutually nested."""
    spans = []
    for b in brackets:
        i, j = (int(x) for x in b)
        if not 0 <= i < j <= n:
            raise ValueError(f"bracket ({i} {j}) out of range for {n} tokens")
        spans.append((i, j))
    ordered = sorted(set(spans))
    for x in range(len(ordered)):
        for y in range(x + 1, len(ordered)):
            if crosses(ordered[x], ordered[y]):
                raise ValueError(f"ill-nested brackets {ordered[x]} and {ordered[y]}")
    return frozenset(ordered)
