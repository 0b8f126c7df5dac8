"""LALR(1) parse tables for an epsilon-free backbone grammar.

States are built from the LR(0) canonical collection in breadth-first order
(successor symbols visited in sorted order), and lookaheads are attached by
fixpoint propagation over kernel and closure items.  Conflicts are retained:
a cell may hold several actions, which the GLR driver pursues in parallel.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .backbone import BackboneGrammar

__all__ = ["EOT", "Action", "LRTables", "first_sets", "build_tables"]

EOT = "<eot>"
AUGMENTED = "<start>"


class Action(NamedTuple):
    kind: str  # "accept", "reduce" or "shift"
    target: int = -1  # rule id for reduce, state for shift

    def __repr__(self):
        if self.kind == "accept":
            return "acc"
        return f"{self.kind[0]}{self.target}"


ACCEPT = Action("accept")


def first_sets(bb: BackboneGrammar) -> dict:
    """FIRST set of every nonterminal (no epsilon: the backbone is epsilon-free)."""
    first = {nt: set() for nt in bb.nonterminals}
    changed = True
    while changed:
        changed = False
        for r in bb.rules:
            x = r.rhs[0]
            add = first[x] if x in first else {x}
            before = len(first[r.lhs])
            first[r.lhs] |= add
            if len(first[r.lhs]) != before:
                changed = True
    return {k: frozenset(v) for k, v in first.items()}


@dataclass
class LRTables:
    n_states: int
    action: dict  # (state, terminal) -> tuple[Action, ...]
    goto: dict  # (state, nonterminal) -> state
    grammar: BackboneGrammar = field(repr=False, default=None)
    conflicts: int = 0

    def actions(self, state: int, symbol: str) -> tuple:
        return self.action.get((state, symbol), ())

    def dump(self) -> str:
        lines = []
        for (s, sym), acts in sorted(self.action.items()):
            for a in acts:
                lines.append(f"{s}\t{sym}\t{a!r}")
        for (s, sym), t in sorted(self.goto.items()):
            lines.append(f"{s}\t{sym}\tg{t}")
        return "\n".join(lines) + "\n"

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.dump().encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "n_states": self.n_states,
            "action": [[s, sym, [[a.kind, a.target] for a in acts]] for (s, sym), acts in sorted(self.action.items())],
            "goto": [[s, sym, t] for (s, sym), t in sorted(self.goto.items())],
        }

    @classmethod
    def from_dict(cls, d: dict, grammar: BackboneGrammar) -> "LRTables":
        action = {(s, sym): tuple(Action(k, t) for k, t in acts) for s, sym, acts in d["action"]}
        goto = {(s, sym): t for s, sym, t in d["goto"]}
        conflicts = sum(1 for acts in action.values() if len(acts) > 1)
        return cls(d["n_states"], action, goto, grammar, conflicts)


def build_tables(bb: BackboneGrammar) -> LRTables:
    """Build LALR(1) tables for ``bb``; the augmented rules are S' -> S_v."""
    n = len(bb.rules)
    lhs = [r.lhs for r in bb.rules] + [AUGMENTED] * len(bb.start_symbols)
    rhs = [r.rhs for r in bb.rules] + [(s,) for s in bb.start_symbols]
    by_lhs: dict = {}
    for i in range(n):
        by_lhs.setdefault(lhs[i], []).append(i)
    first = first_sets(bb)

    def closure(kernel):
        items = list(kernel)
        seen = set(items)
        k = 0
        while k < len(items):
            r, d = items[k]
            k += 1
            if d < len(rhs[r]):
                for r2 in by_lhs.get(rhs[r][d], ()):
                    it = (r2, 0)
                    if it not in seen:
                        seen.add(it)
                        items.append(it)
        return items

    kernel0 = tuple((n + k, 0) for k in range(len(bb.start_symbols)))
    states = [closure(kernel0)]
    index = {kernel0: 0}
    trans: dict = {}
    q = deque([0])
    while q:
        s = q.popleft()
        succ: dict = {}
        for r, d in states[s]:
            if d < len(rhs[r]):
                succ.setdefault(rhs[r][d], []).append((r, d + 1))
        for sym in sorted(succ):
            kern = tuple(sorted(set(succ[sym])))
            if kern not in index:
                index[kern] = len(states)
                states.append(closure(kern))
                q.append(index[kern])
            trans[(s, sym)] = index[kern]

    # lookahead propagation over (state, item) nodes
    node_id: dict = {}
    nodes = []
    for s, items in enumerate(states):
        for it in items:
            node_id[(s, it)] = len(nodes)
            nodes.append((s, it))
    la = [set() for _ in nodes]
    edges = [[] for _ in nodes]
    for s, items in enumerate(states):
        for r, d in items:
            src = node_id[(s, (r, d))]
            if d >= len(rhs[r]):
                continue
            x = rhs[r][d]
            edges[src].append(node_id[(trans[(s, x)], (r, d + 1))])
            for r2 in by_lhs.get(x, ()):
                dst = node_id[(s, (r2, 0))]
                if d + 1 < len(rhs[r]):
                    nxt = rhs[r][d + 1]
                    la[dst] |= first.get(nxt, {nxt})
                else:
                    edges[src].append(dst)
    for k in range(len(bb.start_symbols)):
        la[node_id[(0, (n + k, 0))]].add(EOT)
    work = deque(i for i in range(len(nodes)) if la[i])
    queued = set(work)
    while work:
        i = work.popleft()
        queued.discard(i)
        for j in edges[i]:
            if not la[i] <= la[j]:
                la[j] |= la[i]
                if j not in queued:
                    queued.add(j)
                    work.append(j)

    action: dict = {}
    goto: dict = {}
    for (s, sym), t in trans.items():
        if sym in bb.nonterminals:
            goto[(s, sym)] = t
        else:
            action.setdefault((s, sym), set()).add(Action("shift", t))
    for i, (s, (r, d)) in enumerate(nodes):
        if d == len(rhs[r]):
            act = ACCEPT if r >= n else Action("reduce", r)
            for a in la[i]:
                if r >= n and a != EOT:
                    continue
                action.setdefault((s, a), set()).add(act)
    action = {k: tuple(sorted(v)) for k, v in action.items()}
    conflicts = sum(1 for v in action.values() if len(v) > 1)
    return LRTables(len(states), action, goto, bb, conflicts)
