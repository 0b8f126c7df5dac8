from collections import Counter

import pytest

from conftest import words
from problr.backbone import compile_backbone
from problr.glr import parse, unpack
from problr.grammar import GrammarError, parse_grammar
from problr.lalr import build_tables
from problr.oracle import enumerate_analyses
from problr.textgrammar import (
    depunctuate,
    integrate,
    load_packaged_grammar,
    realign_brackets,
    text_grammar,
    to_text_labels,
)
from problr.tokens import Token, parse_sentence
from problr.trees import SchemaTree, to_schema_tree


def nodes(tree):
    yield tree
    for c in tree.children:
        if isinstance(c, SchemaTree):
            yield from nodes(c)


def analyses(tables, toks):
    res = parse(tables, toks)
    if not res.ok:
        return []
    return [to_schema_tree(tables.grammar, d) for d in unpack(res.forest)]


# judgments: accepted / rejected text sentences over placeholder words

def test_unbalanced_dash_before_stop_accepted(text_tables):
    assert parse(text_tables, words("w w pda w w w w pfs")).count() == 1


def test_balanced_dash_before_stop_rejected(text_tables):
    assert parse(text_tables, words("w w pda w w w w pda pfs")).count() == 0


def test_dash_adjunct_before_bracketed_adjunct_rejected(text_tables):
    bad = words("w w pda w w w w pda pbo w w w w pbc w w w pfs")
    assert parse(text_tables, bad).count() == 0
    good = words("w w pbo w w w w pbc pda w w w w pda w w w pfs")
    assert parse(text_tables, good).count() >= 1


def test_colon_adjunct_scopes_over_following_punctuation(text_tables):
    toks = words("w w w w pcl w w w w w w pco w w w w w w w w pfs")
    trees = analyses(text_tables, toks)
    assert trees
    for t in trees:
        colon = [n for n in nodes(t) if n.label.startswith("Ta[") and "cl=+" in n.label]
        assert len(colon) == 1
        # the adjunct runs to the last word, never stopping at the comma
        assert colon[0].end == len(toks) - 1


def test_semicolon_units():
    t = build_tables(compile_backbone(text_grammar()))
    assert parse(t, words("w w psc w w pfs")).count() == 1
    assert parse(t, words("w w psc pfs")).count() == 0


def test_question_and_exclamation_optional(text_tables):
    assert parse(text_tables, words("w w w pqu")).count() == 1
    assert parse(text_tables, words("w w w")).count() == 1


COMMA_COUNTS = [1, 2, 6, 15, 43, 121, 356, 1052, 3170]


@pytest.mark.parametrize("k", range(9))
def test_comma_ambiguity_sequence(text_tables, k):
    toks = tuple(" pco ".join(["w w"] * (k + 1)).split()) + ("pfs",)
    assert parse(text_tables, toks).count() == COMMA_COUNTS[k]


@pytest.mark.parametrize("k", range(5))
def test_comma_ambiguity_matches_oracle(text_tables, k):
    toks = tuple(" pco ".join(["w"] * (k + 1)).split()) + ("pfs",)
    res = parse(text_tables, toks)
    orc = enumerate_analyses(text_tables.grammar, toks)
    assert res.count() == len(orc) == COMMA_COUNTS[k]
    assert Counter(unpack(res.forest)) == Counter(orc)


def test_to_text_labels():
    toks = parse_sentence("Max_NP1 fell_VVD ,_pco ._pfs")
    assert [t.label for t in to_text_labels(toks)] == ["w", "w", "pco", "pfs"]
    assert to_text_labels(["NN1", "pda"]) == ("w", "pda")


# integration

POS = """
feature agr residue
start S
rule s: S -> N2 V2
rule n: N2 -> NN1
rule n2: N2 -> PPHS1
rule v: V2 -> VVD
rule vo: V2 -> VVD N2
"""


def test_integration_adds_hosts_and_adjunction():
    g = integrate(parse_grammar(POS), text_grammar(), unit_hosts=("S",), adjunction_hosts=("N2",))
    names = {r.name for r in g.rules}
    assert "T/leaf/S" in names and "N2/ta+" in names
    assert "T/leaf" not in names
    assert not any(c.major == "w" for r in g.rules for d in r.daughters for c in d.alternatives)
    assert g.start == "TxtS"
    again = parse_grammar(g.to_source())
    assert [r.name for r in again.rules] == [r.name for r in g.rules]


def test_integrated_balanced_adjunct_attaches_to_host():
    g = integrate(parse_grammar(POS), text_grammar(), ("S", "N2"), ("N2",))
    t = build_tables(compile_backbone(g))
    toks = tuple("PPHS1 pco PPHS1 VVD pco VVD NN1 pfs".split())
    trees = analyses(t, toks)
    assert trees
    hosts = [n for tr in trees for n in nodes(tr) if n.rule == "N2/ta+"]
    assert hosts and all((h.start, h.end) == (0, 5) for h in hosts)


def test_integration_with_empty_text_grammar_is_identity():
    pos = parse_grammar(POS)
    g = integrate(pos, parse_grammar(""))
    assert [r.name for r in g.rules] == [r.name for r in pos.rules]
    assert g.start == pos.start


def test_integration_errors():
    txt = text_grammar()
    with pytest.raises(GrammarError, match="host"):
        integrate(parse_grammar(POS), txt, unit_hosts=("X2",))
    clash = parse_grammar(POS.replace("feature agr residue", "feature cm residue"))
    with pytest.raises(GrammarError, match="feature"):
        integrate(clash, txt)
    dup = parse_grammar(POS + "rule T/leaf: N2 -> NP1\n")
    with pytest.raises(GrammarError, match="rule names"):
        integrate(dup, txt)


def test_dash_list_adjunct_attaches_to_pronominal_np(demo_tables):
    toks = parse_sentence("the_AT three_MC -_pda Sue_NP1 ,_pco Anna_NP1 ,_pco and_CC Max_NP1 -_pda laughed_VVD ._pfs")
    trees = analyses(demo_tables, toks)
    assert len(trees) == len(enumerate_analyses(demo_tables.grammar, toks)) == 2
    for t in trees:
        host = [n for n in nodes(t) if n.rule == "N2/ta+" and "da=+" in n.children[1].label]
        assert [(n.start, n.end) for n in host] == [(0, 10)]
        first = host[0].children[0]
        assert (first.label, first.start, first.end) == ("N2", 0, 2)


def test_packaged_grammars_load():
    assert load_packaged_grammar("demo.grm").start == "S"
    assert text_grammar().start == "TxtS"


# depunctuation

def test_depunctuate_keeps_final_terminator():
    toks = parse_sentence("a_AT ,_pco b_NN1 -_pda c_NN1 ._pfs")
    kept, index = depunctuate(toks)
    assert [t.surface for t in kept] == ["a", "b", "c", "."]
    assert index == (0, 2, 4, 5)
    kept, index = depunctuate(parse_sentence("a_AT ,_pco b_NN1"))
    assert index == (0, 2)


def test_depunctuate_without_internal_punctuation_is_identity():
    toks = parse_sentence("a_AT b_NN1 ._pfs")
    assert depunctuate(toks) == (toks, (0, 1, 2))


def test_realign_brackets():
    index = (0, 2, 4, 5)  # tokens 1 and 3 removed
    assert realign_brackets({(0, 2), (1, 4), (3, 4), (0, 6)}, index) == {(0, 1), (1, 2), (0, 4)}
    with pytest.raises(ValueError):
        realign_brackets({(0, 9)}, index, n_original=6)


def test_token_objects():
    assert str(Token("can't", "VM")) == "can't_VM"
