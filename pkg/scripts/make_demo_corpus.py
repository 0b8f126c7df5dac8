"""Regenerate the punctuation-sensitive demo corpus in src/problr/data/demo.

Sentences come from templates whose key constituents are known.  Each
sentence is parsed under those brackets; among the compatible analyses the
one with fewest text-grammar nodes (punctuation handled syntactically where
the syntax can) is pinned as gold.
"""

import random
import sys
from pathlib import Path

from problr.backbone import compile_backbone
from problr.io import write_brackets, write_sentences
from problr.lalr import build_tables
from problr.textgrammar import demo_grammar
from problr.tokens import Token
from problr.training import candidate_analyses
from problr.trees import to_schema_tree, tree_brackets

OUT = Path(__file__).resolve().parent.parent / "src" / "problr" / "data" / "demo"

NAMES = ["John", "Mary", "Sue", "Bill", "Kim", "Max", "Anna", "Tom"]
NOUNS = ["man", "dog", "park", "telescope", "house", "garden", "hill", "cat", "box", "car", "woman", "bridge"]
ADJS = ["old", "big", "small", "red"]
VERBS = ["saw", "liked", "found", "met", "watched", "visited"]
INTRANS = ["left", "slept", "laughed", "waited"]
PREPS = ["in", "with", "near", "on", "from"]


def leaf(word, tag):
    return Token(word, tag)


def node(*kids):
    return list(kids)


def flatten(tree, out, spans):
    start = len(out)
    for k in tree:
        if isinstance(k, Token):
            out.append(k)
        else:
            flatten(k, out, spans)
    if len(out) - start > 1:
        spans.add((start, len(out)))


def name(r):
    return node(leaf(r.choice(NAMES), "NP1"))


def det_np(r):
    if r.random() < 0.3:
        return node(leaf("a", "AT1"), leaf(r.choice(ADJS), "JJ"), leaf(r.choice(NOUNS), "NN1"))
    return node(leaf("the", "AT"), leaf(r.choice(NOUNS), "NN1"))


def pp(r):
    return node(leaf(r.choice(PREPS), "II"), det_np(r))


def comma():
    return leaf(",", "pco")


def stop():
    return leaf(".", "pfs")


def subj(r):
    return name(r) if r.random() < 0.6 else det_np(r)


# each template returns the sentence tree (without the final stop)
def low_attach(r):
    return node(subj(r), node(leaf(r.choice(VERBS), "VVD"), node(det_np(r), pp(r))))


def high_attach_comma(r):
    vp = node(leaf(r.choice(VERBS), "VVD"), node(node(det_np(r), pp(r)), pp(r)))
    return node(subj(r), node(vp, comma(), pp(r)))


def preposed_comma(r):
    return node(pp(r), comma(), node(subj(r), node(leaf(r.choice(VERBS), "VVD"), det_np(r))))


def appositive(r):
    np_ = node(name(r), node(comma(), det_np(r), comma()))
    return node(np_, node(leaf(r.choice(VERBS), "VVD"), det_np(r)))


def np_list(r):
    items = [det_np(r) if r.random() < 0.5 else name(r) for _ in range(3)]
    lst = node(node(items[0], comma(), items[1]), leaf("and", "CC"), items[2])
    return node(lst, node(leaf(r.choice(VERBS), "VVD"), det_np(r)))


def dash_list(r):
    names = r.sample(NAMES, 3)
    inner = node(node(leaf(names[0], "NP1"), comma(), leaf(names[1], "NP1")), comma(), leaf("and", "CC"), leaf(names[2], "NP1"))
    np_ = node(node(leaf("the", "AT"), leaf("three", "MC")), node(leaf("-", "pda"), inner, leaf("-", "pda")))
    return node(np_, node(leaf(r.choice(INTRANS), "VVD")))


TEMPLATES = {
    "low": low_attach,
    "high": high_attach_comma,
    "pre": preposed_comma,
    "app": appositive,
    "list": np_list,
    "dash": dash_list,
}
TRAIN_MIX = ["low"] * 5 + ["high"] * 3 + ["pre"] * 2 + ["app"] * 2 + ["list"] * 2 + ["dash"]
# the test set holds only sentences with internal punctuation
TEST_MIX = ["high", "high", "high", "pre", "app", "list", "dash"]


def text_nodes(tree):
    if isinstance(tree, int):
        return 0
    own = 1 if tree.label.split("[")[0] in ("Tu", "T", "Ta") else 0
    return own + sum(text_nodes(c) for c in tree.children)


def build(r, mix, count, tables):
    sents, keys, sels, golds = [], [], [], []
    while len(sents) < count:
        tree = TEMPLATES[r.choice(mix)](r)
        toks, spans = [], set()
        flatten(tree, toks, spans)
        toks.append(stop())
        analyses = candidate_analyses(tables, toks, spans)
        if not analyses:
            sys.exit(f"template sentence does not parse: {' '.join(map(str, toks))}")
        trees = [to_schema_tree(tables.grammar, d) for d in analyses]
        idx = min(range(len(trees)), key=lambda i: (text_nodes(trees[i]), i))
        sents.append(tuple(toks))
        keys.append(frozenset(spans))
        sels.append(idx)
        golds.append(tree_brackets(trees[idx], len(toks)))
    return sents, keys, sels, golds


def main():
    bb = compile_backbone(demo_grammar())
    tables = build_tables(bb)
    r = random.Random(20240611)
    OUT.mkdir(parents=True, exist_ok=True)
    sents, keys, sels, _ = build(r, TRAIN_MIX, 120, tables)
    write_sentences(sents, OUT / "train.txt")
    write_brackets(keys, OUT / "train.brackets")
    (OUT / "train.select").write_text("".join(f"{i}\n" for i in sels))
    sents, _, _, golds = build(r, TEST_MIX, 60, tables)
    write_sentences(sents, OUT / "test.txt")
    write_brackets(golds, OUT / "test.gold")


if __name__ == "__main__":
    main()
