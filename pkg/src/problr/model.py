"""Probabilistic LR model: parse actions conditioned on (state, lookahead).

A derivation is scored by the LR actions that build it.  Training counts the
(state, lookahead, action) transitions of each training derivation;
probabilities are Good-Turing smoothed over every transition in the table and
normalised within each (state, lookahead) cell.

Scores are kept as exact integers (log-probabilities scaled by 2**1074, which
is exact for every finite double), so summing a history does not depend on
evaluation order and n-best ties are decided reproducibly by comparing event
sequences.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .glr import Derivation, Forest, _postorder, unpack
from .lalr import EOT, Action, LRTables
from .tokens import Token
from .trees import SchemaTree, to_schema_tree

__all__ = [
    "TransitionEvent",
    "HistoryError",
    "extract_history",
    "train",
    "smooth",
    "LRModel",
    "RankedAnalysis",
    "nbest",
    "nbest_bruteforce",
    "save_model",
    "load_model",
    "ModelFormatError",
]

MODEL_VERSION = 1
_SCALE = 1074  # 2**-1074 is the smallest positive double


class TransitionEvent(NamedTuple):
    state: int
    lookahead: str
    action: Action

    def __repr__(self):
        return f"({self.state},{self.lookahead},{self.action!r})"


class HistoryError(ValueError):
    """A derivation whose LR history is not licensed by the tables."""


def _labels(tokens):
    return [t.label if isinstance(t, Token) else t for t in tokens]


def extract_history(tables: LRTables, derivation: Derivation, tokens) -> list:
    """The sequence of LR transitions that builds ``derivation``.

    Shift and reduce events are replayed against the tables on an explicit
    state stack; an event the tables do not license raises HistoryError.
    """
    labels = _labels(tokens)
    rules = tables.grammar.rules
    stack = [0]
    events = []

    def la(i):
        return labels[i] if i < len(labels) else EOT

    # iterative postorder; returns the end position of each subtree
    work = [(derivation, 0, False)]
    ends = []
    while work:
        node, _, done = work.pop()
        if isinstance(node, int):
            sym = labels[node]
            acts = tables.actions(stack[-1], sym)
            shift = [a for a in acts if a.kind == "shift"]
            if not shift:
                raise HistoryError(f"no shift of {sym!r} in state {stack[-1]}")
            events.append(TransitionEvent(stack[-1], sym, shift[0]))
            stack.append(shift[0].target)
            ends.append(node + 1)
            continue
        if not done:
            work.append((node, 0, True))
            for c in reversed(node.children):
                work.append((c, 0, False))
            continue
        rule = rules[node.rule]
        k = len(node.children)
        end = ends[-1]
        del ends[-k:]
        act = Action("reduce", node.rule)
        if act not in tables.actions(stack[-1], la(end)):
            raise HistoryError(f"reduce by rule {node.rule} not licensed in state {stack[-1]} on {la(end)!r}")
        events.append(TransitionEvent(stack[-1], la(end), act))
        del stack[-k:]
        nxt = tables.goto.get((stack[-1], rule.lhs))
        if nxt is None:
            raise HistoryError(f"no goto on {rule.lhs!r} from state {stack[-1]}")
        stack.append(nxt)
        ends.append(end)
    if ends != [len(labels)]:
        raise HistoryError("derivation does not span the input")
    acc = Action("accept")
    if acc not in tables.actions(stack[-1], EOT):
        raise HistoryError(f"state {stack[-1]} does not accept")
    events.append(TransitionEvent(stack[-1], EOT, acc))
    return events


def train(histories: Iterable) -> Counter:
    """Transition counts over a collection of histories."""
    counts: Counter = Counter()
    for h in histories:
        counts.update(h)
    return counts


def _exact(logp: float) -> int:
    return int(Fraction(logp) * (1 << _SCALE))


def _from_exact(x: int) -> float:
    return x / (1 << _SCALE) if x > -(1 << (_SCALE + 1000)) else -math.inf


@dataclass
class LRModel:
    """Smoothed transition probabilities for one set of tables."""

    tables: LRTables = field(repr=False)
    counts: dict
    logprobs: dict  # TransitionEvent -> float
    count_of_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        self._exact = {e: _exact(lp) for e, lp in self.logprobs.items()}

    def logprob(self, event: TransitionEvent) -> float:
        return self.logprobs[event]

    def prob(self, event: TransitionEvent) -> float:
        return math.exp(self.logprobs[event])

    def exact_score(self, history) -> int:
        return sum(self._exact[e] for e in history)

    def score(self, history) -> float:
        """Log-probability of a history (exact sum, rounded once)."""
        return _from_exact(self.exact_score(history))

    def cell(self, state: int, lookahead: str) -> dict:
        return {
            e.action: p
            for e, p in self.logprobs.items()
            if e.state == state and e.lookahead == lookahead
        }


def smooth(counts, tables: LRTables) -> LRModel:
    """Good-Turing smoothing over all transitions of ``tables``.

    Adjusted counts are r* = (r+1) N_{r+1} / N_r, falling back to r when
    N_{r+1} is zero; unseen transitions get max(N_1, 1) / N_0 so that every
    permitted action keeps non-zero probability.  Normalisation is per
    (state, lookahead) cell.
    """
    universe = [
        TransitionEvent(s, sym, a) for (s, sym), acts in sorted(tables.action.items()) for a in acts
    ]
    known = set(universe)
    for e in counts:
        if e not in known:
            raise HistoryError(f"event {e!r} is not a transition of these tables")
    r_of = {e: counts.get(e, 0) for e in universe}
    nr = Counter(r_of.values())

    def adjusted(r):
        if r == 0:
            return max(nr.get(1, 0), 1) / nr[0]
        if nr.get(r + 1, 0) == 0:
            return float(r)
        return (r + 1) * nr[r + 1] / nr[r]

    adj = {r: adjusted(r) for r in nr}
    cells: dict = {}
    for e in universe:
        cells.setdefault((e.state, e.lookahead), []).append(e)
    logprobs = {}
    for events in cells.values():
        mass = [adj[r_of[e]] for e in events]
        total = math.fsum(mass)
        for e, m in zip(events, mass):
            logprobs[e] = math.log(m / total) if total > 0 else -math.log(len(events))
    return LRModel(tables, {e: c for e, c in counts.items() if c}, logprobs, dict(sorted(nr.items())))


class RankedAnalysis(NamedTuple):
    rank: int
    logprob: float
    derivation: Derivation
    history: tuple
    tree: SchemaTree


class _Cand(NamedTuple):
    key: tuple  # (-exact score, events)
    score: int
    events: tuple
    deriv: object


def _merge(a: list, b: list, k: int) -> list:
    """Top-k concatenations of candidate lists ``a`` x ``b``."""
    out = []
    for x in a:
        for y in b:
            s = x.score + y.score
            ev = x.events + y.events
            out.append(_Cand((-s, ev), s, ev, x.deriv + (y.deriv,)))
    return heapq.nsmallest(k, out)


def nbest(forest: Forest, model: LRModel, n: int) -> list:
    """The ``n`` most probable analyses, best first, found exactly.

    Each forest node keeps its own k best sub-analyses; because a subtree's
    history depends only on the node (its span, symbol and left state) and
    the ordering is preserved under concatenation, the per-node lists combine
    into the exact global ranking.  Ties are broken by event sequence.
    """
    if n <= 0 or forest is None:
        return []
    tables = model.tables
    labels = _labels(forest.tokens)
    ex = model._exact

    def la(i):
        return labels[i] if i < len(labels) else EOT

    best: dict = {}
    for nd in _postorder(forest.roots):
        if nd.is_leaf:
            ev = TransitionEvent(nd.state, nd.symbol, Action("shift", nd.shift))
            best[nd.id] = [_Cand((-ex[ev], (ev,)), ex[ev], (ev,), nd.start)]
            continue
        cands = []
        for p in nd.packs:
            part = [_Cand((0, ()), 0, (), ())]
            for c in p.children:
                part = _merge(part, best[c.id], n)
            ev = TransitionEvent(p.state, la(nd.end), Action("reduce", p.rule))
            for x in part:
                s = x.score + ex[ev]
                evs = x.events + (ev,)
                cands.append(_Cand((-s, evs), s, evs, Derivation(p.rule, x.deriv)))
        best[nd.id] = heapq.nsmallest(n, cands)
    final = []
    for r in forest.roots:
        q = tables.goto[(0, r.symbol)]
        ev = TransitionEvent(q, EOT, Action("accept"))
        for x in best[r.id]:
            s = x.score + ex[ev]
            evs = x.events + (ev,)
            final.append(_Cand((-s, evs), s, evs, x.deriv))
    final = heapq.nsmallest(n, final)
    bb = tables.grammar
    return [
        RankedAnalysis(i + 1, _from_exact(c.score), c.deriv, c.events, to_schema_tree(bb, c.deriv))
        for i, c in enumerate(final)
    ]


def nbest_bruteforce(forest: Forest, model: LRModel, n: int) -> list:
    """Reference ranking: score every unpacked derivation and sort."""
    if forest is None:
        return []
    bb = model.tables.grammar
    scored = []
    for d in unpack(forest):
        h = tuple(extract_history(model.tables, d, forest.tokens))
        s = model.exact_score(h)
        scored.append(((-s, h), s, d))
    scored.sort(key=lambda x: x[0])
    return [
        RankedAnalysis(i + 1, _from_exact(s), d, h, to_schema_tree(bb, d))
        for i, ((_, h), s, d) in enumerate(scored[:n])
    ]


# --- persistence ---------------------------------------------------------------


class ModelFormatError(ValueError):
    pass


def _fmt_action(a: Action) -> str:
    return repr(a)


def _parse_action(s: str) -> Action:
    if s == "acc":
        return Action("accept")
    kind = {"s": "shift", "r": "reduce"}.get(s[:1])
    if kind is None:
        raise ModelFormatError(f"bad action {s!r}")
    return Action(kind, int(s[1:]))


def save_model(model: LRModel, path) -> None:
    tables = model.tables
    lines = [
        f"problr-model\t{MODEL_VERSION}",
        f"grammar\t{tables.grammar.hash}",
        f"tables\t{tables.hash}",
        "smoothing\tgood-turing\tunseen-floor=1",
        "count-of-counts\t" + " ".join(f"{r}:{c}" for r, c in sorted(model.count_of_counts.items())),
    ]
    for e, lp in sorted(model.logprobs.items()):
        c = model.counts.get(e, 0)
        kind = "event" if c else "unseen"
        cols = [kind, str(e.state), e.lookahead, _fmt_action(e.action)]
        if c:
            cols.append(str(c))
        cols.append(repr(lp))
        lines.append("\t".join(cols))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path, tables: LRTables) -> LRModel:
    """Read a model file, checking it was trained against ``tables``."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split("\t")[0] != "problr-model":
        raise ModelFormatError("not a model file")
    header = dict(l.split("\t", 1) for l in lines[1:4])
    if int(lines[0].split("\t")[1]) != MODEL_VERSION:
        raise ModelFormatError("unsupported model version")
    if header.get("grammar") != tables.grammar.hash or header.get("tables") != tables.hash:
        raise ModelFormatError("model was trained for a different grammar or table set")
    nr = {}
    for item in lines[4].split("\t", 1)[1].split():
        r, c = item.split(":")
        nr[int(r)] = int(c)
    counts, logprobs = {}, {}
    for line in lines[5:]:
        cols = line.split("\t")
        e = TransitionEvent(int(cols[1]), cols[2], _parse_action(cols[3]))
        if cols[0] == "event":
            counts[e] = int(cols[4])
        logprobs[e] = float(cols[-1])
    return LRModel(tables, counts, logprobs, nr)
