"""Exhaustive reference enumerator for small inputs.

Enumerates every derivation of every start symbol over a token sequence by
memoised top-down splitting of spans.  It shares nothing with the LR
machinery: no tables, no stack, and residue checking goes through the public
:func:`~problr.grammar.unify` on position-prefixed feature structures.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

from .backbone import BackboneGrammar
from .glr import Derivation
from .grammar import EMPTY, FeatureStructure, Var, canonical, unify
from .tokens import Token, crosses

__all__ = ["OracleOverflow", "enumerate_analyses", "oracle_count"]


class OracleOverflow(RuntimeError):
    pass


def _prefixed(fs: FeatureStructure, pos: int, rename: Optional[str] = None) -> FeatureStructure:
    out = {}
    for k, v in fs.items():
        if rename is not None and isinstance(v, Var):
            v = Var(f"{rename}{v.name}")
        out[f"{pos}.{k}"] = v
    return FeatureStructure(out)


def _combine(rule, child_residues) -> Optional[FeatureStructure]:
    acc = FeatureStructure()
    for pos, tmpl in enumerate(rule.residue):
        acc = unify(acc, _prefixed(tmpl, pos))
    for k, res in enumerate(child_residues):
        if not res:
            continue
        want = rule.residue[k + 1]
        shared = FeatureStructure({f: v for f, v in res.items() if f in want})
        acc = unify(acc, _prefixed(shared, k + 1, rename=f"c{k}#"))
        if acc is None:
            return None
    mother = {k[2:]: v for k, v in acc.items() if k.startswith("0.")}
    return canonical(mother)


def enumerate_analyses(
    bb: BackboneGrammar, tokens, limit: Optional[int] = None, brackets=None
) -> list:
    """Every derivation of the input, as :class:`Derivation` trees.

    Raises OracleOverflow if more than ``limit`` partial analyses arise.
    """
    labels = tuple(t.label if isinstance(t, Token) else t for t in tokens)
    n = len(labels)
    spans = tuple(brackets or ())

    @lru_cache(maxsize=None)
    def analyses(sym, i, j):
        if sym not in bb.nonterminals:
            return ((i, EMPTY),) if j == i + 1 and labels[i] == sym else ()
        if spans and any(crosses((i, j), b) for b in spans):
            return ()
        out = []
        for rule in bb.by_lhs[sym]:
            for kids in sequences(rule.rhs, i, j):
                trees = tuple(t for t, _ in kids)
                if rule.has_residue:
                    res = _combine(rule, [r for _, r in kids])
                    if res is None:
                        continue
                else:
                    res = EMPTY
                out.append((Derivation(rule.id, trees), res))
                if limit is not None and len(out) > limit:
                    raise OracleOverflow(f"more than {limit} analyses of {sym} over {i}:{j}")
        return tuple(out)

    @lru_cache(maxsize=None)
    def sequences(rhs, i, j):
        if len(rhs) == 1:
            return tuple((a,) for a in analyses(rhs[0], i, j))
        out = []
        # every daughter covers at least one token
        for k in range(i + 1, j - len(rhs) + 2):
            heads = analyses(rhs[0], i, k)
            if not heads:
                continue
            rests = sequences(rhs[1:], k, j)
            for h in heads:
                for r in rests:
                    out.append((h,) + r)
                    if limit is not None and len(out) > limit:
                        raise OracleOverflow("too many partial analyses")
        return tuple(out)

    if n == 0:
        return []
    result = []
    for s in bb.start_symbols:
        result.extend(t for t, _ in analyses(s, 0, n))
    return result


def oracle_count(bb: BackboneGrammar, tokens, limit: Optional[int] = None, brackets=None) -> int:
    return len(enumerate_analyses(bb, tokens, limit, brackets))
