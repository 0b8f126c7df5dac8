"""Generalised LR parsing over (possibly conflicting) LALR(1) tables.

The parser keeps a graph-structured stack (GSS) whose nodes are keyed by
(state, position) and builds a packed parse forest on the fly.  Forest nodes
are keyed by (symbol, span, residue, left LR state); alternative analyses of
the same node are stored as packs, each remembering the rule and the LR state
from which the reduction was made.  Keying on the residue keeps the analysis
count exact when unification filters combinations, and keying on the left
state makes every subtree's LR history independent of its context.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .grammar import EMPTY, FeatureStructure, Unifier, Var, canonical
from .lalr import EOT, LRTables
from .tokens import Token, check_brackets, crosses

__all__ = [
    "Pack",
    "ForestNode",
    "Forest",
    "ParseStats",
    "ParseResult",
    "Derivation",
    "parse",
    "constrained_parse",
    "count_analyses",
    "unpack",
    "reduce_residue",
]


class Pack(NamedTuple):
    rule: int
    children: tuple
    state: int  # LR state on top of the stack when the reduction was made


class ForestNode:
    __slots__ = ("id", "symbol", "start", "end", "state", "residue", "packs", "shift", "_pack_keys")

    def __init__(self, id, symbol, start, end, state, residue=EMPTY, shift=None):
        self.id = id
        self.symbol = symbol
        self.start = start
        self.end = end
        self.state = state  # LR state to the left of this constituent
        self.residue = residue
        self.packs: list = []
        self.shift = shift  # target state, for leaves
        self._pack_keys: set = set()

    @property
    def is_leaf(self) -> bool:
        return self.shift is not None

    def add_pack(self, pack: Pack) -> bool:
        key = (pack.rule, tuple(c.id for c in pack.children))
        if key in self._pack_keys:
            return False
        self._pack_keys.add(key)
        self.packs.append(pack)
        return True

    def __repr__(self):
        return f"<{self.symbol} {self.start}:{self.end} q{self.state}>"


class Derivation(NamedTuple):
    """A derivation tree; leaves are token indices."""

    rule: int
    children: tuple


@dataclass
class Forest:
    tokens: tuple
    roots: list
    nodes: list
    tables: LRTables = field(repr=False)

    def count(self) -> int:
        return count_analyses(self)

    def dump(self) -> str:
        """One node per line: id, symbol, span, left state, residue, packs."""
        lines = []
        rootset = {r.id for r in self.roots}
        for nd in self.nodes:
            mark = "*" if nd.id in rootset else ""
            if nd.is_leaf:
                lines.append(f"{nd.id}{mark}\t{nd.symbol}\t{nd.start}-{nd.end}\tq{nd.state}\tshift {nd.shift}")
                continue
            packs = " | ".join(
                f"r{p.rule}@q{p.state}(" + ",".join(str(c.id) for c in p.children) + ")"
                for p in nd.packs
            )
            res = repr(nd.residue) if nd.residue else "-"
            lines.append(f"{nd.id}{mark}\t{nd.symbol}\t{nd.start}-{nd.end}\tq{nd.state}\t{res}\t{packs}")
        return "\n".join(lines) + "\n"


@dataclass
class ParseStats:
    forks: int = 0
    gss_nodes: int = 0
    forest_nodes: int = 0
    reductions: int = 0
    elapsed: float = 0.0


@dataclass
class ParseResult:
    status: str  # "ok", "fail" or "timeout"
    forest: Optional[Forest] = None
    position: Optional[int] = None  # first token index that could not be consumed
    stats: ParseStats = field(default_factory=ParseStats)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def count(self) -> int:
        return count_analyses(self.forest) if self.ok else 0


class _GSSNode:
    __slots__ = ("state", "level", "links", "link_keys")

    def __init__(self, state, level):
        self.state = state
        self.level = level
        self.links: list = []  # (predecessor GSS node, forest node)
        self.link_keys: set = set()


class _Timeout(Exception):
    pass


def reduce_residue(rule, children) -> Optional[FeatureStructure]:
    """Unify a rule's residue templates with its daughters' residues."""
    u = Unifier()
    tmpl = rule.residue
    for k, child in enumerate(children):
        want = tmpl[k + 1]
        if not want:
            continue
        got = child.residue
        for f, v in want.items():
            if f not in got:
                continue
            w = got[f]
            if isinstance(w, Var):
                w = Var(f"{k}:{w.name}")
            if not u.unify_values(v, w):
                return None
    return canonical(u.resolve(tmpl[0]))


def _parse(tables: LRTables, tokens, timeout, brackets=None) -> ParseResult:
    bb = tables.grammar
    labels = [t.label if isinstance(t, Token) else t for t in tokens]
    n = len(labels)
    stats = ParseStats()
    t0 = time.monotonic()
    deadline = t0 + timeout if timeout is not None else None
    fnodes: dict = {}
    order: list = []
    rules = bb.rules

    def get_fnode(key, **kw):
        nd = fnodes.get(key)
        if nd is None:
            nd = ForestNode(len(order), **kw)
            fnodes[key] = nd
            order.append(nd)
        return nd

    def finish(status, roots=None, position=None):
        stats.forest_nodes = len(order)
        stats.elapsed = time.monotonic() - t0
        forest = Forest(tuple(tokens), roots, order, tables) if status == "ok" else None
        return ParseResult(status, forest, position, stats)

    start = _GSSNode(0, 0)
    current = {0: start}
    stats.gss_nodes = 1
    try:
        for i in range(n + 1):
            la = labels[i] if i < n else EOT
            queue: deque = deque()

            def schedule(node, link):
                acts = tables.actions(node.state, la)
                if link is None and len(acts) > 1:
                    stats.forks += 1
                for a in acts:
                    if a.kind == "reduce":
                        queue.append((node, a.target, link))

            for node in list(current.values()):
                schedule(node, None)
            while queue:
                node, rid, link = queue.popleft()
                stats.reductions += 1
                if deadline is not None and stats.reductions % 64 == 0 and time.monotonic() > deadline:
                    raise _Timeout
                rule = rules[rid]
                m = len(rule.rhs)
                # enumerate paths of length m back from node
                paths = []
                if link is not None:
                    firsts = [link]
                else:
                    firsts = node.links
                stack = [(pred, (fn,)) for pred, fn in firsts]
                while stack:
                    v, kids = stack.pop()
                    if len(kids) == m:
                        paths.append((v, kids[::-1]))
                        continue
                    for pred, fn in v.links:
                        stack.append((pred, kids + (fn,)))
                for u, kids in paths:
                    span = (u.level, i)
                    if brackets and any(crosses(span, b) for b in brackets):
                        continue
                    if rule.has_residue:
                        res = reduce_residue(rule, kids)
                        if res is None:
                            continue
                    else:
                        res = EMPTY
                    key = (rule.lhs, u.level, i, res, u.state)
                    fn = get_fnode(key, symbol=rule.lhs, start=u.level, end=i, state=u.state, residue=res)
                    fn.add_pack(Pack(rid, kids, node.state))
                    tgt_state = tables.goto.get((u.state, rule.lhs))
                    if tgt_state is None:
                        continue
                    lk = (u.state, u.level, fn.id)
                    tgt = current.get(tgt_state)
                    if tgt is None:
                        tgt = _GSSNode(tgt_state, i)
                        current[tgt_state] = tgt
                        stats.gss_nodes += 1
                        tgt.links.append((u, fn))
                        tgt.link_keys.add(lk)
                        schedule(tgt, None)
                    elif lk not in tgt.link_keys:
                        tgt.link_keys.add(lk)
                        tgt.links.append((u, fn))
                        schedule(tgt, (u, fn))
            if i == n:
                break
            if deadline is not None and time.monotonic() > deadline:
                raise _Timeout
            nxt: dict = {}
            for node in sorted(current.values(), key=lambda g: g.state):
                for a in tables.actions(node.state, la):
                    if a.kind != "shift":
                        continue
                    leaf = get_fnode(
                        ("<leaf>", i, node.state), symbol=la, start=i, end=i + 1, state=node.state, shift=a.target
                    )
                    tgt = nxt.get(a.target)
                    if tgt is None:
                        tgt = nxt[a.target] = _GSSNode(a.target, i + 1)
                        stats.gss_nodes += 1
                    tgt.links.append((node, leaf))
                    tgt.link_keys.add((node.state, node.level, leaf.id))
            if not nxt:
                return finish("fail", position=i)
            current = nxt
    except _Timeout:
        return finish("timeout")

    roots = []
    for node in current.values():
        if not any(a.kind == "accept" for a in tables.actions(node.state, EOT)):
            continue
        for pred, fn in node.links:
            if pred.level == 0 and pred.state == 0 and fn.symbol in bb.start_symbols and fn.start == 0:
                if fn not in roots:
                    roots.append(fn)
    if not roots:
        return finish("fail", position=n)
    return finish("ok", roots)


def parse(tables: LRTables, tokens, timeout: Optional[float] = 30.0) -> ParseResult:
    """Parse a sequence of tokens (or bare labels) into a packed forest."""
    return _parse(tables, tokens, timeout)


def constrained_parse(tables: LRTables, tokens, brackets, timeout: Optional[float] = 30.0) -> ParseResult:
    """Parse keeping only analyses none of whose constituents cross a bracket."""
    spans = check_brackets(brackets, len(tokens))
    return _parse(tables, tokens, timeout, spans)


def _postorder(roots):
    seen = set()
    out = []
    stack = [(r, False) for r in reversed(roots)]
    while stack:
        nd, done = stack.pop()
        if done:
            out.append(nd)
            continue
        if nd.id in seen:
            continue
        seen.add(nd.id)
        stack.append((nd, True))
        for p in nd.packs:
            for c in p.children:
                if c.id not in seen:
                    stack.append((c, False))
    return out


def count_analyses(forest: Optional[Forest]) -> int:
    """Exact number of analyses packed in ``forest`` (0 for no forest)."""
    if forest is None:
        return 0
    counts: dict = {}
    for nd in _postorder(forest.roots):
        if nd.is_leaf:
            counts[nd.id] = 1
            continue
        total = 0
        for p in nd.packs:
            prod = 1
            for c in p.children:
                prod *= counts[c.id]
            total += prod
        counts[nd.id] = total
    return sum(counts[r.id] for r in forest.roots)


def unpack(forest: Forest, limit: Optional[int] = None) -> list:
    """All derivations in the forest (at most ``limit``), in pack order."""
    memo: dict = {}
    for nd in _postorder(forest.roots):
        if nd.is_leaf:
            memo[nd.id] = [nd.start]
            continue
        out = []
        for p in nd.packs:
            combos = [()]
            for c in p.children:
                combos = [x + (y,) for x in combos for y in memo[c.id]]
                if limit is not None and len(combos) > limit:
                    combos = combos[:limit]
            out.extend(Derivation(p.rule, cs) for cs in combos)
            if limit is not None and len(out) >= limit:
                out = out[:limit]
                break
        memo[nd.id] = out
    result = []
    for r in forest.roots:
        result.extend(memo[r.id])
    return result[:limit] if limit is not None else result
