"""Choosing training derivations from bracketed sentences."""

from __future__ import annotations

from typing import Optional

from .glr import constrained_parse, unpack
from .lalr import LRTables
from .trees import to_schema_tree, tree_brackets

__all__ = ["TrainingError", "candidate_analyses", "select_tree"]

UNPACK_LIMIT = 10_000


class TrainingError(ValueError):
    pass


def candidate_analyses(tables: LRTables, tokens, brackets, timeout: Optional[float] = 30.0) -> list:
    """Analyses compatible with ``brackets``, in deterministic forest order."""
    res = constrained_parse(tables, tokens, brackets, timeout)
    if not res.ok:
        return []
    return unpack(res.forest, limit=UNPACK_LIMIT)


def select_tree(tables: LRTables, analyses: list, tokens, brackets=(), index: Optional[int] = None, auto: bool = False):
    """Pick the training derivation for one sentence.

    A unique analysis is taken as is.  Otherwise ``index`` pins one (as
    written in a selection file); failing that, ``auto`` picks the analysis
    sharing the most brackets with ``brackets``, the earliest on ties.
    """
    if not analyses:
        raise TrainingError("no analysis is compatible with the brackets")
    if index is not None:
        if not 0 <= index < len(analyses):
            raise TrainingError(f"selection {index} out of range ({len(analyses)} analyses)")
        return analyses[index]
    if len(analyses) == 1:
        return analyses[0]
    if not auto:
        raise TrainingError(f"{len(analyses)} analyses remain; pin one with a selection")
    bb = tables.grammar
    n = len(tokens)
    want = frozenset(brackets)
    best, best_score = None, -1
    for d in analyses:
        score = len(tree_brackets(to_schema_tree(bb, d), n, exclude_trivial=False) & want)
        if score > best_score:
            best, best_score = d, score
    return best
