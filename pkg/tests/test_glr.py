import random
from collections import Counter

import pytest

from grammar_gen import random_grammar, sample_input
from problr.backbone import compile_backbone
from problr.glr import constrained_parse, count_analyses, parse, unpack
from problr.grammar import parse_grammar
from problr.lalr import build_tables
from problr.oracle import OracleOverflow, enumerate_analyses, oracle_count


def tables_for(src):
    return build_tables(compile_backbone(parse_grammar(src)))


CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430]


@pytest.mark.parametrize("n", range(1, 9))
def test_binary_bracketing_counts_are_catalan(n):
    t = tables_for("rule p: S -> S S\nrule x: S -> x\n")
    res = parse(t, ("x",) * n)
    assert res.ok
    assert res.count() == CATALAN[n - 1]
    assert count_analyses(res.forest) == len(unpack(res.forest))


def test_failure_reports_position():
    t = tables_for("rule s: S -> a b c\n")
    res = parse(t, ("a", "c", "c"))
    assert res.status == "fail" and res.position == 1
    assert res.count() == 0


def test_unknown_label_fails():
    t = tables_for("rule s: S -> a\n")
    assert parse(t, ("zz",)).status == "fail"


def test_residue_clash_filters_analysis():
    src = (
        "feature f residue\n"
        "rule s: S -> A[f=V] B[f=V]\n"
        "rule a: A[f=p] -> a\n"
        "rule b: B[f=q] -> b\n"
    )
    t = tables_for(src)
    assert parse(t, ("a", "b")).count() == 0
    bare = tables_for("rule s: S -> A B\nrule a: A -> a\nrule b: B -> b\n")
    assert parse(bare, ("a", "b")).count() == 1


def test_residue_propagates_through_variables():
    src = (
        "feature f residue\n"
        "rule s: S -> N[f=V] V[f=V]\n"
        "rule n1: N[f=sg] -> it\n"
        "rule n2: N[f=pl] -> they\n"
        "rule np: N[f=V] -> the M[f=V]\n"
        "rule m1: M[f=sg] -> dog\n"
        "rule m2: M[f=pl] -> dogs\n"
        "rule v1: V[f=sg] -> runs\n"
        "rule v2: V[f=pl] -> run\n"
    )
    t = tables_for(src)
    assert parse(t, "the dog runs".split()).count() == 1
    assert parse(t, "the dogs runs".split()).count() == 0
    assert parse(t, "they run".split()).count() == 1


def test_timeout():
    t = tables_for("rule p: S -> S S\nrule x: S -> x\n")
    res = parse(t, ("x",) * 40, timeout=1e-6)
    assert res.status == "timeout" and res.forest is None


def test_constrained_parse_respects_brackets():
    t = tables_for("rule p: S -> S S\nrule x: S -> x\n")
    toks = ("x",) * 4
    assert constrained_parse(t, toks, [(0, 2)]).count() == 2
    assert constrained_parse(t, toks, [(0, 2), (2, 4)]).count() == 1
    assert constrained_parse(t, toks, [(1, 3)]).count() == 2
    with pytest.raises(ValueError):
        constrained_parse(t, toks, [(0, 2), (1, 3)])


def test_constrained_count_matches_oracle():
    bb = compile_backbone(parse_grammar("rule p: S -> S S\nrule x: S -> x\n"))
    t = build_tables(bb)
    toks = ("x",) * 6
    for br in ([(0, 3)], [(2, 5)], [(1, 3), (0, 4)]):
        assert constrained_parse(t, toks, br).count() == oracle_count(bb, toks, brackets=br)


def test_text_grammar_forest_matches_oracle(text_tables):
    toks = tuple("w w pco w w pco w w pfs".split())
    res = parse(text_tables, toks)
    orc = enumerate_analyses(text_tables.grammar, toks)
    assert res.count() == len(orc) > 1
    assert Counter(unpack(res.forest)) == Counter(orc)


def test_random_grammars_match_oracle():
    r = random.Random(11)
    checked = 0
    while checked < 60:
        g = random_grammar(r)
        if g is None:
            continue
        _, bb = g
        t = build_tables(bb)
        toks = sample_input(r, bb)
        try:
            orc = enumerate_analyses(bb, toks, limit=20000)
        except OracleOverflow:
            continue
        res = parse(t, toks)
        assert res.count() == len(orc)
        if res.ok:
            assert Counter(unpack(res.forest)) == Counter(orc)
        checked += 1


def test_unpack_limit():
    t = tables_for("rule p: S -> S S\nrule x: S -> x\n")
    res = parse(t, ("x",) * 6)
    assert len(unpack(res.forest, limit=7)) == 7


def test_forest_dump_is_deterministic(text_tables):
    toks = tuple("w pco w pco w pfs".split())
    assert parse(text_tables, toks).forest.dump() == parse(text_tables, toks).forest.dump()
