"""Random small grammars and inputs for parser-versus-oracle checks."""

import random

from problr.backbone import compile_backbone
from problr.grammar import GrammarError, parse_grammar

NONTERMINALS = ["S", "A", "B"]
TERMINALS = ["a", "b", "c"]
RESIDUE_VALUES = ["x", "y", "V", None, None]


def _category(r, sym, allow_var=True):
    if sym in TERMINALS:
        return sym
    parts = []
    if r.random() < 0.4:
        parts.append("g=" + r.choice(["p", "q"]))
    v = r.choice(RESIDUE_VALUES if allow_var else ["x", "y", None])
    if v is not None:
        parts.append("f=" + v)
    return f"{sym}[{','.join(parts)}]" if parts else sym


def random_grammar_source(r: random.Random, max_rules=12) -> str:
    lines = ["feature g backbone {p,q}", "feature f residue", "start S"]
    n = r.randint(2, max_rules)
    rules = []
    mothers = ["S"] + [r.choice(NONTERMINALS) for _ in range(n - 1)]
    for i, m in enumerate(mothers):
        k = r.choice([1, 1, 2, 2, 2, 3])
        dts = []
        for _ in range(k):
            sym = r.choice(NONTERMINALS + TERMINALS * 2)
            cat = _category(r, sym)
            if r.random() < 0.1:
                cat = f"({cat})" + r.choice("*?")
            dts.append(cat)
        # mothers are fully specified in the backbone feature
        mother = m + "[g=" + r.choice(["p", "q"])
        uses_var = any("f=V" in d for d in dts)
        if uses_var and r.random() < 0.7:
            mother += ",f=V"
        elif r.random() < 0.3:
            mother += ",f=" + r.choice(["x", "y"])
        mother += "]"
        rules.append(f"rule r{i}: {mother} -> {' '.join(dts)}")
    return "\n".join(lines + rules) + "\n"


def random_grammar(r: random.Random, max_rules=12):
    """A compiled random grammar, or None if it is degenerate."""
    src = random_grammar_source(r, max_rules)
    try:
        g = parse_grammar(src)
        bb = compile_backbone(g)
    except GrammarError:
        return None
    if not bb.rules:
        return None
    return src, bb


def sample_input(r: random.Random, bb, max_len=10):
    """A string the backbone derives (when expansion succeeds), else random."""
    if r.random() < 0.25:
        return tuple(r.choice(TERMINALS) for _ in range(r.randint(1, max_len)))
    for _ in range(20):
        out = []
        agenda = [r.choice(bb.start_symbols)]
        ok = True
        while agenda:
            sym = agenda.pop()
            if sym in bb.terminals:
                out.append(sym)
                if len(out) > max_len:
                    ok = False
                    break
                continue
            rules = bb.by_lhs.get(sym)
            if not rules or len(agenda) + len(out) > 3 * max_len:
                ok = False
                break
            agenda.extend(reversed(r.choice(rules).rhs))
        if ok and out:
            return tuple(out)
    return tuple(r.choice(TERMINALS) for _ in range(r.randint(1, max_len)))
