"""The punctuation text grammar and its integration with a syntactic grammar.

The text grammar describes how punctuation marks delimit and separate text
units and adjuncts.  Used on its own, every non-punctuation token is mapped to
the placeholder terminal ``w``.  Integration keeps the text rules, replaces
the word-run leaves with syntactic *unit hosts* (e.g. S, N2), and adds
adjunction rules ``X[ta=+] -> X Ta[bal=+]`` so that balanced adjuncts attach
to syntactic *adjunction hosts*.
"""

from __future__ import annotations

from importlib import resources
from typing import Iterable, Optional, Sequence

from .grammar import (
    Category,
    Daughter,
    FeatureStructure,
    Grammar,
    GrammarError,
    RuleSchema,
    Var,
    parse_grammar,
)
from .tokens import PUNCT_LABELS, TERMINATORS, Token, check_brackets

__all__ = [
    "WORD",
    "text_grammar",
    "load_packaged_grammar",
    "to_text_labels",
    "integrate",
    "depunctuate",
    "realign_brackets",
    "DEMO_UNIT_HOSTS",
    "DEMO_ADJUNCTION_HOSTS",
    "demo_grammar",
]

WORD = "w"


def load_packaged_grammar(name: str) -> Grammar:
    """Load one of the grammars shipped in ``problr/grammars``."""
    text = resources.files("problr").joinpath("grammars").joinpath(name).read_text(encoding="utf-8")
    return parse_grammar(text)


def text_grammar() -> Grammar:
    return load_packaged_grammar("text.grm")


def to_text_labels(tokens: Iterable) -> tuple:
    """Relabel every non-punctuation token as the placeholder word ``w``."""
    out = []
    for t in tokens:
        label = t.label if isinstance(t, Token) else t
        lab = label if label in PUNCT_LABELS else WORD
        out.append(Token(t.surface, lab) if isinstance(t, Token) else lab)
    return tuple(out)


def _mentions_word(rule: RuleSchema) -> bool:
    return any(c.major == WORD for d in rule.daughters for c in d.alternatives)


def _is_leaf_rule(rule: RuleSchema) -> bool:
    return all(c.major == WORD for d in rule.daughters for c in d.alternatives)


def _host_features(pos: Grammar, major: str) -> list:
    """Feature names ``pos`` uses on category ``major``, in declaration order."""
    used = set()
    for r in pos.rules:
        for c in [r.mother] + [a for d in r.daughters for a in d.alternatives]:
            if c.major == major:
                used.update(c.features)
    return [f for f in pos.features if f in used]


def integrate(
    pos: Grammar,
    txt: Grammar,
    unit_hosts: Sequence[str] = ("S",),
    adjunction_hosts: Sequence[str] = ("N2",),
) -> Grammar:
    """Combine a syntactic grammar with a text grammar.

    Feature and rule names of the two grammars must be disjoint.  With an
    empty text grammar the syntactic grammar is returned unchanged.
    """
    if not txt.rules:
        return Grammar(dict(pos.features), list(pos.rules), pos.start, pos.source)
    clash = sorted(set(pos.features) & set(txt.features))
    if clash:
        raise GrammarError(f"feature names declared by both grammars: {', '.join(clash)}")
    names = {r.name for r in pos.rules}
    clash = sorted(names & {r.name for r in txt.rules})
    if clash:
        raise GrammarError(f"rule names defined by both grammars: {', '.join(clash)}")
    pos_nts = pos.nonterminals
    for h in list(unit_hosts) + list(adjunction_hosts):
        if h not in pos_nts:
            raise GrammarError(f"host category {h!r} has no rules in the syntactic grammar")
    if "ta" not in txt.features or "bal" not in txt.features:
        raise GrammarError("text grammar must declare the features 'ta' and 'bal'")

    features = dict(pos.features)
    features.update(txt.features)
    rules = list(pos.rules)
    leaves = [r for r in txt.rules if _is_leaf_rule(r)]
    if not leaves:
        raise GrammarError("text grammar has no word-run leaf rule to attach unit hosts to")
    for r in txt.rules:
        if not _mentions_word(r):
            rules.append(r)
    for leaf in leaves:
        for h in unit_hosts:
            rules.append(RuleSchema(f"{leaf.name}/{h}", leaf.mother, (Daughter((Category(h),)),)))
    for h in adjunction_hosts:
        shared = {f: Var(f"H{i}") for i, f in enumerate(_host_features(pos, h))}
        mother = Category(h, FeatureStructure({**shared, "ta": "+"}))
        host = Category(h, FeatureStructure(shared))
        adj = Category("Ta", FeatureStructure({"bal": "+"}))
        rules.append(RuleSchema(f"{h}/ta+", mother, (Daughter((host,)), Daughter((adj,)))))
    g = Grammar(features, rules, txt.start)
    g.source = g.to_source()
    return g


def depunctuate(tokens: Sequence) -> tuple:
    """Drop sentence-internal punctuation, keeping a final terminator.

    Returns ``(tokens, index_map)`` where ``index_map[k]`` is the original
    position of the k-th kept token.
    """
    kept, index = [], []
    n = len(tokens)
    for i, t in enumerate(tokens):
        label = t.label if isinstance(t, Token) else t
        if label in PUNCT_LABELS and not (i == n - 1 and label in TERMINATORS):
            continue
        kept.append(t)
        index.append(i)
    return tuple(kept), tuple(index)


def realign_brackets(brackets, index_map: Sequence[int], n_original: Optional[int] = None) -> frozenset:
    """Map spans over the original tokens onto the kept tokens.

    A span keeps exactly the surviving tokens it covered; spans that lose all
    their tokens disappear.
    """
    if n_original is not None:
        check_brackets(brackets, n_original)
    out = set()
    for i, j in brackets:
        inside = [k for k, orig in enumerate(index_map) if i <= orig < j]
        if inside:
            out.add((inside[0], inside[-1] + 1))
    return frozenset(out)


DEMO_UNIT_HOSTS = ("S", "N2")
DEMO_ADJUNCTION_HOSTS = ("N2", "V2")


def demo_grammar() -> Grammar:
    """The demonstration syntactic grammar integrated with the text grammar."""
    return integrate(
        load_packaged_grammar("demo.grm"), text_grammar(), DEMO_UNIT_HOSTS, DEMO_ADJUNCTION_HOSTS
    )
