"""Feature-based grammar formalism.

A grammar is written in a small line-oriented language::

    feature sc backbone {+,-}
    feature agr residue
    start TxtS
    rule T/txt-sc1: TxtS -> (Tu[sc=+])* Tu[sc=-] (pex|pqu)?

Feature values are atoms; capitalised names inside ``[...]`` are variables,
and repeated variables within one rule express reentrancy.  ``[+f]`` and
``[-f]`` are accepted as shorthand for ``[f=+]`` and ``[f=-]``.  Symbols that
never appear on the left of a rule are terminals (part-of-speech or
punctuation labels).
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

__all__ = [
    "GrammarError",
    "Var",
    "FeatureDecl",
    "FeatureStructure",
    "Category",
    "Daughter",
    "RuleSchema",
    "Grammar",
    "parse_grammar",
    "load_grammar",
    "unify",
    "Unifier",
]


class GrammarError(ValueError):
    """Malformed grammar source or an unsatisfiable compile request."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True, order=True)
class Var:
    """A feature variable.  Equal names denote the same variable."""

    name: str

    def __repr__(self) -> str:
        return self.name


Value = Union[str, Var]


@dataclass(frozen=True)
class FeatureDecl:
    name: str
    kind: str  # "backbone" or "residue"
    values: tuple = ()

    @property
    def is_backbone(self) -> bool:
        return self.kind == "backbone"


class FeatureStructure(Mapping):
    """Immutable, hashable flat map from feature names to atoms or variables."""

    __slots__ = ("_items", "_hash")

    def __init__(self, items=()):
        if isinstance(items, Mapping):
            items = items.items()
        self._items = tuple(sorted(items))
        self._hash = hash(self._items)

    def __getitem__(self, key):
        for k, v in self._items:
            if k == key:
                return v
        raise KeyError(key)

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, FeatureStructure):
            return self._items == other._items
        return NotImplemented

    def __lt__(self, other):
        return _sort_key(self) < _sort_key(other)

    def variables(self) -> set:
        return {v for _, v in self._items if isinstance(v, Var)}

    def restrict(self, names) -> "FeatureStructure":
        return FeatureStructure((k, v) for k, v in self._items if k in names)

    def without(self, names) -> "FeatureStructure":
        return FeatureStructure((k, v) for k, v in self._items if k not in names)

    def __repr__(self):
        return "[" + ",".join(f"{k}={v}" for k, v in self._items) + "]"


def _sort_key(fs):
    return tuple((k, isinstance(v, Var), str(v)) for k, v in fs.items())


EMPTY = FeatureStructure()


class Unifier:
    """Union-find over variables; atoms are terminal bindings."""

    def __init__(self):
        self._parent: dict = {}

    def find(self, x):
        while isinstance(x, Var) and x in self._parent:
            nxt = self._parent[x]
            if isinstance(nxt, Var) and nxt in self._parent:
                self._parent[x] = self._parent[nxt]
            x = nxt
        return x

    def unify_values(self, a, b) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return True
        if isinstance(a, Var):
            self._parent[a] = b
            return True
        if isinstance(b, Var):
            self._parent[b] = a
            return True
        return False

    def unify_fs(self, a: FeatureStructure, b: FeatureStructure) -> bool:
        for k, v in a.items():
            if k in b and not self.unify_values(v, b[k]):
                return False
        return True

    def resolve(self, fs: Mapping) -> dict:
        return {k: self.find(v) for k, v in fs.items()}


def canonical(items: Mapping) -> FeatureStructure:
    """Rename the variables of ``items`` to _1, _2, ... in feature order."""
    names: dict = {}
    out = []
    for k in sorted(items):
        v = items[k]
        if isinstance(v, Var):
            if v not in names:
                names[v] = Var(f"_{len(names) + 1}")
            v = names[v]
        out.append((k, v))
    return FeatureStructure(out)


def unify(a: FeatureStructure, b: FeatureStructure) -> Optional[FeatureStructure]:
    """Most general unifier of two flat feature structures, or None.

    Variables with the same name in ``a`` and ``b`` are the same variable.
    Unbound variables are kept under their original names.
    """
    u = Unifier()
    if not u.unify_fs(a, b):
        return None
    merged = dict(b.items())
    merged.update(a.items())
    return FeatureStructure(u.resolve(merged))


@dataclass(frozen=True)
class Category:
    major: str
    features: FeatureStructure = EMPTY

    def __repr__(self):
        if not self.features:
            return self.major
        return self.major + repr(self.features)


@dataclass(frozen=True)
class Daughter:
    """One right-hand-side term: a disjunction of categories plus a modifier."""

    alternatives: tuple
    modifier: Optional[str] = None  # None, "*" or "?"

    def __repr__(self):
        body = "|".join(map(repr, self.alternatives))
        if self.modifier is None and len(self.alternatives) == 1:
            return body
        return f"({body}){self.modifier or ''}"


@dataclass(frozen=True)
class RuleSchema:
    name: str
    mother: Category
    daughters: tuple
    line: Optional[int] = None

    def __repr__(self):
        return f"rule {self.name}: {self.mother!r} -> " + " ".join(map(repr, self.daughters))


@dataclass
class Grammar:
    features: dict = field(default_factory=dict)  # name -> FeatureDecl
    rules: list = field(default_factory=list)
    start: Optional[str] = None
    source: str = ""

    @property
    def nonterminals(self) -> set:
        return {r.mother.major for r in self.rules}

    @property
    def terminals(self) -> set:
        nts = self.nonterminals
        out = set()
        for r in self.rules:
            for d in r.daughters:
                out.update(c.major for c in d.alternatives if c.major not in nts)
        return out

    def rule(self, name: str) -> RuleSchema:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_source(self) -> str:
        lines = []
        for f in self.features.values():
            if f.is_backbone:
                lines.append(f"feature {f.name} backbone {{{','.join(f.values)}}}")
            else:
                lines.append(f"feature {f.name} residue")
        if self.start:
            lines.append(f"start {self.start}")
        lines.extend(repr(r) for r in self.rules)
        return "\n".join(lines) + "\n"


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<arrow>->)
      | (?P<punct>[\[\]()|*?,=])
      | (?P<sign>[+-])(?=[A-Za-z])
      | (?P<atom>[A-Za-z0-9_$.'][A-Za-z0-9_$.']*|[+-])
    )""",
    re.VERBOSE,
)


class _Lexer:
    def __init__(self, text: str, line: int, offset: int):
        self.toks = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                col = offset + len(text[pos:]) - len(text[pos:].lstrip()) + pos + 1
                raise GrammarError(f"unexpected character {text[pos:].lstrip()[:1]!r}", line, col)
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append((kind, m.group(kind), offset + start + 1))
            pos = m.end()
        self.i = 0
        self.line = line
        self.end_col = offset + len(text) + 1

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end_col)

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, col = self.next()
        if val != value:
            found = "end of line" if val is None else repr(val)
            raise GrammarError(f"expected {value!r}, found {found}", self.line, col)
        return col

    def done(self):
        return self.i >= len(self.toks)


def _is_var(name: str) -> bool:
    return name[:1].isupper()


def _parse_category(lx: _Lexer, features: dict) -> Category:
    kind, name, col = lx.next()
    if kind != "atom" or not (name[:1].isalpha()):
        found = "end of line" if name is None else repr(name)
        raise GrammarError(f"expected a category symbol, found {found}", lx.line, col)
    feats = {}
    if lx.peek()[1] == "[":
        lx.next()
        while True:
            kind, tok, col = lx.next()
            if kind == "sign":
                sign = tok
                kind, fname, col = lx.next()
                value = sign
            elif kind == "atom":
                fname = tok
                lx.expect("=")
                vk, value, vcol = lx.next()
                if vk not in ("atom", "sign") and value not in ("+", "-"):
                    raise GrammarError(f"expected a feature value after {fname}=", lx.line, vcol)
            else:
                raise GrammarError("expected a feature specification", lx.line, col)
            if fname not in features:
                raise GrammarError(f"undeclared feature {fname!r}", lx.line, col)
            if fname in feats:
                raise GrammarError(f"feature {fname!r} specified twice", lx.line, col)
            decl = features[fname]
            if _is_var(value):
                value = Var(value)
            elif decl.is_backbone and value not in decl.values:
                raise GrammarError(
                    f"value {value!r} not declared for backbone feature {fname!r}", lx.line, col
                )
            feats[fname] = value
            kind, tok, col = lx.next()
            if tok == "]":
                break
            if tok != ",":
                raise GrammarError("expected ',' or ']' in feature list", lx.line, col)
    return Category(name, FeatureStructure(feats))


def _parse_daughters(lx: _Lexer, features: dict) -> tuple:
    out = []
    while not lx.done():
        kind, tok, col = lx.peek()
        if tok == "(":
            lx.next()
            alts = [_parse_category(lx, features)]
            while lx.peek()[1] == "|":
                lx.next()
                alts.append(_parse_category(lx, features))
            lx.expect(")")
            mod = None
            if lx.peek()[1] in ("*", "?"):
                mod = lx.next()[1]
            out.append(Daughter(tuple(alts), mod))
        else:
            out.append(Daughter((_parse_category(lx, features),)))
    return tuple(out)


_FEATURE_LINE = re.compile(r"feature\s+(\S+)\s+(backbone|residue)\s*(.*)$")
_RULE_LINE = re.compile(r"rule\s+([^:\s][^:]*?)\s*:(.*)$")


def parse_grammar(text: str) -> Grammar:
    """Parse grammar source text into a :class:`Grammar`."""
    g = Grammar(source=text)
    names = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        keyword = stripped.split(None, 1)[0]
        if keyword == "feature":
            m = _FEATURE_LINE.match(stripped)
            if not m:
                raise GrammarError("malformed feature declaration", lineno, indent + 1)
            name, kind, rest = m.groups()
            if name in g.features:
                raise GrammarError(f"feature {name!r} declared twice", lineno, indent + 1)
            values = ()
            if kind == "backbone":
                vm = re.fullmatch(r"\{([^{}]*)\}", rest.strip())
                if not vm:
                    raise GrammarError("backbone feature needs a value set {v1,v2,...}", lineno)
                values = tuple(v.strip() for v in vm.group(1).split(",") if v.strip())
                if not values or len(set(values)) != len(values):
                    raise GrammarError("backbone value set must be non-empty and distinct", lineno)
            elif rest.strip():
                raise GrammarError("residue features take no value set", lineno)
            g.features[name] = FeatureDecl(name, kind, values)
        elif keyword == "start":
            parts = stripped.split()
            if len(parts) != 2:
                raise GrammarError("expected 'start <Symbol>'", lineno, indent + 1)
            g.start = parts[1]
        elif keyword == "rule":
            m = _RULE_LINE.match(stripped)
            if not m:
                raise GrammarError("expected 'rule <name>: <Mother> -> <daughters>'", lineno, indent + 1)
            name, body = m.groups()
            if name in names:
                raise GrammarError(f"rule name {name!r} used twice", lineno, indent + 1)
            names.add(name)
            offset = indent + stripped.index(":") + 1
            lx = _Lexer(body, lineno, offset)
            mother = _parse_category(lx, g.features)
            lx.expect("->")
            daughters = _parse_daughters(lx, g.features)
            if not daughters:
                raise GrammarError("a rule needs at least one daughter", lineno)
            g.rules.append(RuleSchema(name, mother, daughters, lineno))
        else:
            raise GrammarError(f"unknown statement {keyword!r}", lineno, indent + 1)
    if not g.rules:
        return g
    if g.start is None:
        g.start = g.rules[0].mother.major
    if g.start not in g.nonterminals:
        raise GrammarError(f"start symbol {g.start!r} has no rules")
    for r in g.rules:
        for d in r.daughters:
            for c in d.alternatives:
                if c.major not in g.nonterminals and c.features:
                    raise GrammarError(f"terminal {c.major!r} cannot carry features", r.line)
    return g


def load_grammar(path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())


def iter_categories(rule: RuleSchema) -> Iterator[Category]:
    yield rule.mother
    for d in rule.daughters:
        yield from d.alternatives
