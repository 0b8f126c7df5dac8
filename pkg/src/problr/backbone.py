"""Compilation of feature-based rule schemata into a context-free backbone.

Backbone features (those with a finite declared value set) are folded into
the symbol names, so ``Tu[sc=+]`` becomes the atomic symbol ``Tu[sc=+,...]``.
Residue features stay attached to each rule position and are checked by
unification while parsing.  Kleene daughters expand to a left-recursive
auxiliary symbol (``X+ -> X+ X | X``) plus a variant without the daughter;
optional daughters expand to the two variants.  The result is epsilon-free.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field

from .grammar import (
    Category,
    FeatureStructure,
    Grammar,
    GrammarError,
    Var,
    canonical,
)

__all__ = ["BackboneRule", "BackboneGrammar", "compile_backbone", "DEFAULT_RULE_CAP"]

DEFAULT_RULE_CAP = 50_000


@dataclass(frozen=True)
class BackboneRule:
    id: int
    lhs: str
    rhs: tuple
    residue: tuple  # FeatureStructure per position: mother first, then daughters
    source: str  # name of the originating schema

    def __len__(self):
        return len(self.rhs)

    @property
    def has_residue(self) -> bool:
        return any(self.residue)

    def __repr__(self):
        return f"{self.id}: {self.lhs} -> {' '.join(self.rhs)}"


@dataclass
class BackboneGrammar:
    rules: list
    start_symbols: tuple
    terminals: frozenset
    aux_symbols: frozenset = frozenset()
    residue_features: frozenset = frozenset()
    major: dict = field(default_factory=dict)  # symbol -> major category name

    def __post_init__(self):
        self.nonterminals = frozenset(r.lhs for r in self.rules)
        self.by_lhs: dict = {}
        for r in self.rules:
            self.by_lhs.setdefault(r.lhs, []).append(r)

    def dump(self) -> str:
        lines = [f"start {' '.join(self.start_symbols)}"]
        for r in self.rules:
            res = ""
            if r.has_residue:
                res = "  " + " ".join(repr(fs) for fs in r.residue)
            lines.append(f"{r.id}\t{r.lhs} -> {' '.join(r.rhs)}\t{r.source}{res}")
        return "\n".join(lines) + "\n"

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.dump().encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "start": list(self.start_symbols),
            "terminals": sorted(self.terminals),
            "aux": sorted(self.aux_symbols),
            "residue_features": sorted(self.residue_features),
            "major": dict(sorted(self.major.items())),
            "rules": [
                [r.lhs, list(r.rhs), [_fs_to_json(fs) for fs in r.residue], r.source]
                for r in self.rules
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BackboneGrammar":
        rules = [
            BackboneRule(i, lhs, tuple(rhs), tuple(_fs_from_json(x) for x in res), src)
            for i, (lhs, rhs, res, src) in enumerate(d["rules"])
        ]
        return cls(
            rules,
            tuple(d["start"]),
            frozenset(d["terminals"]),
            frozenset(d["aux"]),
            frozenset(d["residue_features"]),
            dict(d["major"]),
        )


def _fs_to_json(fs: FeatureStructure) -> dict:
    return {k: ({"var": v.name} if isinstance(v, Var) else v) for k, v in fs.items()}


def _fs_from_json(d: dict) -> FeatureStructure:
    return FeatureStructure(
        {k: (Var(v["var"]) if isinstance(v, dict) else v) for k, v in d.items()}
    )


def symbol_name(major: str, values: dict, order: tuple) -> str:
    if not order:
        return major
    return major + "[" + ",".join(f"{f}={values[f]}" for f in order) + "]"


class _Compiler:
    def __init__(self, grammar: Grammar, rule_cap: int):
        self.g = grammar
        self.cap = rule_cap
        self.backbone = {n for n, d in grammar.features.items() if d.is_backbone}
        self.residue = {n for n, d in grammar.features.items() if not d.is_backbone}
        nts = grammar.nonterminals
        # backbone features relevant to each major category, in declaration order
        used: dict = {}
        for r in grammar.rules:
            for c in [r.mother] + [a for d in r.daughters for a in d.alternatives]:
                if c.major in nts:
                    used.setdefault(c.major, set()).update(f for f in c.features if f in self.backbone)
        decl_order = list(grammar.features)
        self.order = {m: tuple(f for f in decl_order if f in fs) for m, fs in used.items()}
        self.rules: list = []
        self.seen: set = set()
        self.aux: set = set()
        self.aux_done: set = set()
        self.major: dict = {}

    # -- schema expansion ------------------------------------------------------

    def flat_variants(self, schema):
        """Yield daughter sequences of (kind, Category) with kind 'cat' or 'plus'."""
        choices = []
        for d in schema.daughters:
            opts = []
            for alt in d.alternatives:
                if d.modifier == "*":
                    opts.append(("plus", alt))
                elif d.modifier == "?":
                    opts.append(("cat", alt))
                else:
                    opts.append(("cat", alt))
            if d.modifier in ("*", "?"):
                opts = [None] + opts
            choices.append(opts)
        for combo in itertools.product(*choices):
            seq = tuple(x for x in combo if x is not None)
            if seq:
                yield seq

    def values_of(self, name):
        return self.g.features[name].values

    def instantiate(self, schema_name, mother: Category, items):
        """Expand backbone variables/unspecified features; emit backbone rules."""
        cats = [mother] + [c for _, c in items]
        # collect backbone variables and their admissible values
        var_domain: dict = {}
        for c in cats:
            for f, v in c.features.items():
                if f in self.backbone and isinstance(v, Var):
                    dom = self.values_of(f)
                    prev = var_domain.get(v, dom)
                    var_domain[v] = tuple(x for x in prev if x in dom)
        vars_ = sorted(var_domain, key=lambda v: v.name)
        domains = [var_domain[v] for v in vars_]
        for assignment in itertools.product(*domains):
            env = dict(zip(vars_, assignment))
            # per position: fixed backbone values, and unspecified features to enumerate
            slots = []
            for pos, c in enumerate(cats):
                kind = "cat" if pos == 0 else items[pos - 1][0]
                if c.major not in self.order or kind == "plus":
                    slots.append([None])
                    continue
                fixed = {}
                free = []
                for f in self.order[c.major]:
                    if f in c.features:
                        v = c.features[f]
                        fixed[f] = env[v] if isinstance(v, Var) else v
                    else:
                        free.append(f)
                opts = []
                for combo in itertools.product(*(self.values_of(f) for f in free)):
                    vals = dict(fixed)
                    vals.update(zip(free, combo))
                    opts.append(vals)
                slots.append(opts)
            for picked in itertools.product(*slots):
                lhs = self._name(mother.major, picked[0])
                rhs = []
                residue = []
                for pos, c in enumerate(cats):
                    res = c.features.restrict(self.residue)
                    res = FeatureStructure(
                        {k: env.get(v, v) if isinstance(v, Var) else v for k, v in res.items()}
                    )
                    residue.append(res)
                    if pos == 0:
                        continue
                    kind = items[pos - 1][0]
                    if kind == "plus":
                        rhs.append(self._aux(schema_name, c, env))
                    else:
                        rhs.append(self._name(c.major, picked[pos]))
                self._emit(lhs, tuple(rhs), tuple(residue), schema_name)

    def _name(self, major, vals):
        if vals is None:
            self.major.setdefault(major, major)
            return major
        name = symbol_name(major, vals, self.order[major])
        self.major[name] = major
        return name

    def _aux(self, schema_name, cat: Category, env) -> str:
        """Name of the auxiliary one-or-more symbol for ``cat`` under ``env``."""
        feats = {}
        for f, v in cat.features.items():
            if isinstance(v, Var) and f in self.backbone:
                v = env[v]
            feats[f] = v
        spec = Category(cat.major, FeatureStructure(feats))
        bb = {f: v for f, v in spec.features.items() if f in self.backbone}
        if cat.major in self.order:
            name = symbol_name(cat.major, bb, tuple(f for f in self.order[cat.major] if f in bb))
        else:
            name = cat.major
        res_spec = spec.features.restrict(self.residue)
        if res_spec:
            name += "{" + ",".join(f"{k}={v}" for k, v in canonical(res_spec).items()) + "}"
        name += "+"
        self.aux.add(name)
        self.major[name] = name
        if name not in self.aux_done:
            self.aux_done.add(name)
            res = spec.features.restrict(self.residue)
            mother = Category(name, res)
            # auxiliary rules: X+ -> X+ X | X
            self._pending_aux.append((schema_name, mother, spec))
        return name

    def _emit(self, lhs, rhs, residue, source):
        key = (lhs, rhs, residue)
        if key in self.seen:
            return
        self.seen.add(key)
        if len(self.rules) >= self.cap:
            raise GrammarError(
                f"backbone exceeds the rule cap of {self.cap} while expanding schema {source!r}"
            )
        self.rules.append((lhs, rhs, residue, source))

    def _emit_aux(self, schema_name, mother: Category, spec: Category):
        name = mother.major
        res = mother.features
        # X+ -> X+ X
        self._instantiate_aux(schema_name, name, res, [("aux", name, res), ("cat", spec)])
        # X+ -> X
        self._instantiate_aux(schema_name, name, res, [("cat", spec)])

    def _instantiate_aux(self, schema_name, name, res, parts):
        slots = []
        for p in parts:
            if p[0] == "aux":
                slots.append([(p[1], p[2])])
                continue
            spec = p[1]
            if spec.major not in self.order:
                slots.append([(spec.major, spec.features.restrict(self.residue))])
                continue
            fixed = {f: v for f, v in spec.features.items() if f in self.backbone}
            free = [f for f in self.order[spec.major] if f not in fixed]
            opts = []
            for combo in itertools.product(*(self.values_of(f) for f in free)):
                vals = dict(fixed)
                vals.update(zip(free, combo))
                opts.append((self._name(spec.major, vals), spec.features.restrict(self.residue)))
            slots.append(opts)
        for picked in itertools.product(*slots):
            rhs = tuple(s for s, _ in picked)
            residue = (res,) + tuple(r for _, r in picked)
            self._emit(name, rhs, residue, schema_name)

    def run(self) -> BackboneGrammar:
        g = self.g
        if not g.rules:
            return BackboneGrammar([], (), frozenset(), frozenset(), frozenset(self.residue), {})
        self._pending_aux = []
        for schema in g.rules:
            for seq in self.flat_variants(schema):
                self.instantiate(schema.name, schema.mother, seq)
            while self._pending_aux:
                self._emit_aux(*self._pending_aux.pop(0))
        nts = {lhs for lhs, *_ in self.rules}
        start_syms = sorted(s for s in nts if self.major.get(s) == g.start and s not in self.aux)
        rules = _prune(self.rules, start_syms, g.terminals)
        _check_unary_cycles(rules)
        brules = [BackboneRule(i, *r) for i, r in enumerate(rules)]
        lhs_set = {r.lhs for r in brules}
        terminals = frozenset(s for r in brules for s in r.rhs if s not in lhs_set)
        start_syms = tuple(s for s in start_syms if s in lhs_set)
        if not start_syms:
            raise GrammarError(f"start symbol {g.start!r} derives no terminal string")
        majors = {s: self.major.get(s, s) for s in lhs_set | terminals}
        return BackboneGrammar(
            brules,
            start_syms,
            terminals,
            frozenset(self.aux & lhs_set),
            frozenset(self.residue),
            majors,
        )


def _prune(rules, start_syms, terminals):
    """Drop rules that are unproductive or unreachable from the start symbols."""
    lhs_set = {s for r in rules for s in r[1] if s not in terminals} | {r[0] for r in rules}
    productive: set = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs, *_ in rules:
            if lhs not in productive and all(s in productive or s not in lhs_set for s in rhs):
                productive.add(lhs)
                changed = True
    ok = [r for r in rules if r[0] in productive and all(s in productive or s not in lhs_set for s in r[1])]
    reach = set(s for s in start_syms if s in productive)
    by_lhs: dict = {}
    for r in ok:
        by_lhs.setdefault(r[0], []).append(r)
    stack = list(reach)
    while stack:
        s = stack.pop()
        for r in by_lhs.get(s, ()):
            for d in r[1]:
                if d in by_lhs and d not in reach:
                    reach.add(d)
                    stack.append(d)
    return [r for r in ok if r[0] in reach]


def _check_unary_cycles(rules):
    unary: dict = {}
    lhs_set = {r[0] for r in rules}
    for lhs, rhs, _, src in rules:
        if len(rhs) == 1 and rhs[0] in lhs_set:
            unary.setdefault(lhs, set()).add((rhs[0], src))
    state: dict = {}

    def visit(s, path):
        state[s] = 1
        for t, src in sorted(unary.get(s, ())):
            if state.get(t) == 1:
                cyc = path + [t]
                raise GrammarError(
                    "unary cycle makes ambiguity unbounded: " + " -> ".join(cyc) + f" (schema {src!r})"
                )
            if t not in state:
                visit(t, path + [t])
        state[s] = 2

    for s in sorted(unary):
        if s not in state:
            visit(s, [s])


def compile_backbone(grammar: Grammar, rule_cap: int = DEFAULT_RULE_CAP) -> BackboneGrammar:
    """Compile a feature grammar into its context-free backbone.

    Raises GrammarError if expansion exceeds ``rule_cap`` rules or the
    grammar contains a cycle of unary rules.
    """
    return _Compiler(grammar, rule_cap).run()
