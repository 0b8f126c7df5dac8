import pytest

from problr.grammar import (
    EMPTY,
    FeatureStructure,
    GrammarError,
    Var,
    canonical,
    parse_grammar,
    unify,
)

SRC = """
# comment line
feature vt backbone {i,t}
feature agr residue
start S
rule s: S -> N2[agr=A] V2[agr=A]
rule v: V2[agr=A] -> V0[vt=t,agr=A] (N2)?
rule n: N2[agr=sg] -> NP1 (JJ|AT)* NN1
rule v0: V0[vt=t] -> VVD
"""


def test_parse_structure():
    g = parse_grammar(SRC)
    assert g.start == "S"
    assert [r.name for r in g.rules] == ["s", "v", "n", "v0"]
    assert g.features["vt"].values == ("i", "t")
    assert g.features["agr"].kind == "residue"
    assert g.nonterminals == {"S", "V2", "N2", "V0"}
    assert g.terminals == {"NP1", "JJ", "AT", "NN1", "VVD"}


def test_variables_and_modifiers():
    g = parse_grammar(SRC)
    s = g.rule("s")
    assert s.daughters[0].alternatives[0].features["agr"] == Var("A")
    n = g.rule("n")
    assert n.daughters[1].modifier == "*"
    assert [c.major for c in n.daughters[1].alternatives] == ["JJ", "AT"]
    assert g.rule("v").daughters[1].modifier == "?"


def test_sign_shorthand():
    g = parse_grammar("feature cm backbone {+,-}\nrule a: T[+cm] -> T[-cm] pco\nrule b: T[-cm] -> w\n")
    r = g.rule("a")
    assert r.mother.features["cm"] == "+"
    assert r.daughters[0].alternatives[0].features["cm"] == "-"


def test_round_trip_source():
    g = parse_grammar(SRC)
    again = parse_grammar(g.to_source())
    assert [(r.name, r.mother, r.daughters) for r in again.rules] == [
        (r.name, r.mother, r.daughters) for r in g.rules
    ]
    assert again.features == g.features


@pytest.mark.parametrize(
    "src, line",
    [
        ("rule a: S -> \n", 1),
        ("feature f backbone {a}\nrule a: S[f=b] -> x\n", 2),
        ("rule a: S[g=b] -> x\n", 1),
        ("rule a: S -> x\nrule a: S -> y\n", 2),
        ("bogus S\n", 1),
        ("feature f backbone {}\n", 1),
        ("rule a: S -> (x\n", 1),
    ],
)
def test_errors_carry_line(src, line):
    with pytest.raises(GrammarError) as info:
        parse_grammar(src)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_terminal_with_features_rejected():
    with pytest.raises(GrammarError):
        parse_grammar("feature f residue\nrule a: S -> x[f=a]\n")


def test_unify_atoms_and_variables():
    a = FeatureStructure({"agr": Var("A"), "n": "sg"})
    b = FeatureStructure({"agr": "pl"})
    assert unify(a, b) == FeatureStructure({"agr": "pl", "n": "sg"})
    assert unify(FeatureStructure({"agr": "sg"}), b) is None
    assert unify(EMPTY, b) == b


def test_unify_shared_variable():
    a = FeatureStructure({"x": Var("A"), "y": Var("A")})
    b = FeatureStructure({"x": "p", "y": "q"})
    assert unify(a, b) is None
    assert unify(a, FeatureStructure({"x": "p"})) == FeatureStructure({"x": "p", "y": "p"})


def test_canonical_renames_variables():
    a = canonical({"x": Var("Foo"), "y": Var("Foo"), "z": Var("Bar")})
    b = canonical({"x": Var("Q"), "y": Var("Q"), "z": Var("R")})
    assert a == b
