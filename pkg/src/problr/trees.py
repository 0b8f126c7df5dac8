"""Schema-level trees and the brackets they induce."""

from __future__ import annotations

from typing import NamedTuple

from .backbone import BackboneGrammar
from .glr import Derivation

__all__ = ["SchemaTree", "to_schema_tree", "tree_spans", "tree_brackets", "format_tree"]


class SchemaTree(NamedTuple):
    label: str  # backbone symbol
    rule: str  # originating schema name
    children: tuple  # SchemaTree or token index
    start: int
    end: int


def _flatten(bb: BackboneGrammar, d: Derivation) -> list:
    """Daughters of ``d`` with auxiliary (Kleene) nodes spliced out."""
    out = []
    for c in d.children:
        if isinstance(c, Derivation) and bb.rules[c.rule].lhs in bb.aux_symbols:
            out.extend(_flatten(bb, c))
        else:
            out.append(c)
    return out


def to_schema_tree(bb: BackboneGrammar, d: Derivation) -> SchemaTree:
    rule = bb.rules[d.rule]
    kids = []
    for c in _flatten(bb, d):
        kids.append(c if isinstance(c, int) else to_schema_tree(bb, c))
    start = kids[0] if isinstance(kids[0], int) else kids[0].start
    end = kids[-1] + 1 if isinstance(kids[-1], int) else kids[-1].end
    return SchemaTree(rule.lhs, rule.source, tuple(kids), start, end)


def tree_spans(tree: SchemaTree) -> list:
    """Spans of all constituents, outermost first (with repeats for unary chains)."""
    out = [(tree.start, tree.end)]
    for c in tree.children:
        if isinstance(c, SchemaTree):
            out.extend(tree_spans(c))
    return out


def tree_brackets(tree: SchemaTree, n: int, exclude_trivial: bool = True) -> frozenset:
    """Bracket set of a tree over ``n`` tokens.

    With ``exclude_trivial`` the single-token and whole-sentence spans are
    dropped, since every analysis shares them.
    """
    spans = set(tree_spans(tree))
    if exclude_trivial:
        spans = {s for s in spans if s[1] - s[0] > 1 and s != (0, n)}
    return frozenset(spans)


def format_tree(tree, tokens=None) -> str:
    if isinstance(tree, int):
        return str(tokens[tree]) if tokens is not None else str(tree)
    inner = " ".join(format_tree(c, tokens) for c in tree.children)
    return f"({tree.label} {inner})"
