"""Input checking shared by the estimator API and the command line."""

from __future__ import annotations

import numbers
import os
from pathlib import Path

from .grammar import Grammar, load_grammar, parse_grammar
from .tokens import Token, check_brackets, parse_sentence

__all__ = [
    "check_sentence",
    "check_sentences",
    "check_bracket_sets",
    "check_selection",
    "check_positive_int",
    "check_timeout",
    "resolve_grammar",
]


def check_sentence(s) -> tuple:
    """Coerce one sentence to a tuple of tokens.

    Accepts a ``surface_LABEL`` string, or a sequence of Tokens, label
    strings or ``(surface, label)`` pairs.
    """
    if isinstance(s, str):
        toks = parse_sentence(s)
    else:
        toks = []
        for t in s:
            if isinstance(t, Token):
                toks.append(t)
            elif isinstance(t, str):
                toks.append(Token(t, t))
            elif isinstance(t, (tuple, list)) and len(t) == 2:
                toks.append(Token(str(t[0]), str(t[1])))
            else:
                raise TypeError(f"cannot read {t!r} as a token")
    if not toks:
        raise ValueError("empty sentence")
    return tuple(toks)


def check_sentences(X) -> list:
    if isinstance(X, str):
        raise TypeError("expected a sequence of sentences, got a single string")
    return [check_sentence(s) for s in X]


def check_bracket_sets(y, X) -> list:
    """Validate one bracket set per sentence against the sentence lengths."""
    y = list(y)
    if len(y) != len(X):
        raise ValueError(f"{len(X)} sentences but {len(y)} bracket sets")
    return [check_brackets([tuple(b) for b in spans], len(s)) for spans, s in zip(y, X)]


def check_selection(selection, n: int):
    if selection is None:
        return None
    selection = list(selection)
    if len(selection) != n:
        raise ValueError(f"{n} sentences but {len(selection)} selections")
    for s in selection:
        if s is not None and (not isinstance(s, numbers.Integral) or s < 0):
            raise ValueError(f"selection {s!r} is not a non-negative integer")
    return selection


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_timeout(value):
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or value <= 0:
        raise ValueError(f"timeout must be a positive number or None, got {value!r}")
    return float(value)


def resolve_grammar(spec) -> Grammar:
    """Turn a grammar argument into a Grammar.

    ``spec`` may be a Grammar, grammar source text, a path to a ``.grm``
    file, or the name of a packaged grammar: ``demo`` (the integrated
    demonstration grammar) or ``text`` (the standalone text grammar).
    Bare names are also looked up in the directory named by ``PROBLR_DATA``.
    """
    from .textgrammar import demo_grammar, load_packaged_grammar, text_grammar

    if isinstance(spec, Grammar):
        return spec
    if not isinstance(spec, (str, os.PathLike)):
        raise TypeError(f"cannot use {spec!r} as a grammar")
    s = os.fspath(spec)
    if "\n" in s:
        return parse_grammar(s)
    if s == "demo":
        return demo_grammar()
    if s == "text":
        return text_grammar()
    p = Path(s)
    if p.is_file():
        return load_grammar(p)
    data = os.environ.get("PROBLR_DATA")
    for name in (s, s + ".grm"):
        if data and (Path(data) / name).is_file():
            return load_grammar(Path(data) / name)
    if not p.suffix:
        try:
            return load_packaged_grammar(s + ".grm")
        except FileNotFoundError:
            pass
    raise FileNotFoundError(f"no grammar found for {s!r}")
