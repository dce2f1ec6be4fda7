"""Algebra expressions: the tree the logic compiler emits and the algebra
front end parses, plus the evaluator that runs it on relations.

Concrete syntax, loosest binding first::

    expr    := inter (("+" | "-") inter)*          union, difference
    inter   := joined ("&" joined)*                intersection
    joined  := unary ("|x|" unary)*                join
    unary   := "~" unary | postfix                 complement
    postfix := primary (":" pattern)*              filtering
    primary := NAME | "(" expr ")"
             | "project" "{" [index ("," index)*] "}" "(" expr ")"
             | "cyl" "{" [index ":" NAME ("," index ":" NAME)*] "}" "(" expr ")"
    pattern := "[" [term ("," term)*] "]" | "{" [index ":" term ("," ...)*] "}"
    term    := NAME | "'" literal "'"

Bare names inside patterns are indeterminates, quoted literals are ground
terms resolved through the domain registry when evaluated.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Protocol

from . import relation as rel
from .core import DomainRegistry, FiniteMap, Signature, iota, sorted_indexes
from .errors import ETRSyntaxError, UnknownRelation
from .relation import Ground, Indeterminate, Pattern, Relation


class Environment(Protocol):
    registry: DomainRegistry

    def lookup(self, name: str) -> Relation: ...


@dataclass(frozen=True)
class Quoted:
    """A ground term whose domain is not known until evaluation."""

    literal: str

    def __str__(self) -> str:
        return f"'{self.literal}'"


# -- expression nodes ---------------------------------------------------------

@dataclass(frozen=True)
class Ref:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Filter:
    source: object
    entries: FiniteMap  # index -> Indeterminate | Ground | Quoted

    def __str__(self) -> str:
        keys = self.entries.sorted_keys()
        if keys == list(iota(len(keys))):
            pat = "[" + ",".join(str(self.entries[k]) for k in keys) + "]"
        else:
            pat = "{" + ",".join(f"{k}:{self.entries[k]}" for k in keys) + "}"
        return f"{_wrap(self.source)}:{pat}"


@dataclass(frozen=True)
class Rename:
    source: object
    entries: FiniteMap  # index -> Indeterminate, bijective

    def __str__(self) -> str:
        return str(Filter(self.source, self.entries))


@dataclass(frozen=True)
class Join:
    parts: tuple

    def __str__(self) -> str:
        return " |x| ".join(_wrap(p, Join) for p in self.parts)


@dataclass(frozen=True)
class Project:
    source: object
    indexes: frozenset

    def __str__(self) -> str:
        return "project{" + ",".join(sorted_indexes(self.indexes)) + "}(" + str(self.source) + ")"


@dataclass(frozen=True)
class Complement:
    source: object

    def __str__(self) -> str:
        return "~" + _wrap(self.source)


@dataclass(frozen=True)
class Cylinder:
    source: object
    signature: Signature

    def __str__(self) -> str:
        cols = ",".join(f"{i}:{self.signature[i]}" for i in self.signature.sorted_keys())
        return "cyl{" + cols + "}(" + str(self.source) + ")"


@dataclass(frozen=True)
class BinOp:
    op: str  # "&", "+", "-"
    left: object
    right: object

    def __str__(self) -> str:
        return f"{_wrap(self.left)} {self.op} {_wrap(self.right)}"


def _wrap(node, *bare_ok) -> str:
    if isinstance(node, (Ref, Project, Cylinder, Filter, Rename, Complement) + bare_ok):
        return str(node)
    return f"({node})"


AlgebraExpr = Ref | Filter | Rename | Join | Project | Complement | Cylinder | BinOp


# -- evaluation ---------------------------------------------------------------

def _positional(entries: FiniteMap, node, r: Relation, env: Environment) -> FiniteMap:
    """Read a ``[t0, ..., tk-1]`` pattern against a relation with named indexes.

    Positions follow the catalog's attribute order for stored relations and
    index order otherwise.
    """
    keys = set(entries)
    if keys == r.indexes or keys != set(iota(len(entries))) or len(entries) != len(r.signature):
        return entries
    order_of = getattr(env, "index_order", None)
    if isinstance(node, Ref) and order_of is not None:
        order = order_of(node.name)
    else:
        order = sorted_indexes(r.signature)
    return FiniteMap((order[int(k)], t) for k, t in entries.items())


def _resolve_pattern(entries: FiniteMap, source: Relation, env: Environment) -> Pattern:
    terms = {}
    for i, term in entries.items():
        terms[i] = Ground(env.registry.value(term.literal)) if isinstance(term, Quoted) else term
    return Pattern.over(terms, source.signature)


def evaluate(expr: AlgebraExpr, env: Environment) -> Relation:
    match expr:
        case Ref(name):
            return env.lookup(name)
        case Filter(source, entries):
            r = evaluate(source, env)
            entries = _positional(entries, source, r, env)
            return rel.filter(r, _resolve_pattern(entries, r, env), env.registry)
        case Rename(source, entries):
            r = evaluate(source, env)
            entries = _positional(entries, source, r, env)
            return rel.rename(r, _resolve_pattern(entries, r, env))
        case Join(parts):
            return rel.join_all([evaluate(p, env) for p in parts])
        case Project(source, indexes):
            return rel.project(evaluate(source, env), indexes)
        case Complement(source):
            return rel.complement(evaluate(source, env), env.registry)
        case Cylinder(source, signature):
            return rel.cylinder(evaluate(source, env), signature, env.registry)
        case BinOp(op, left, right):
            fn = {"&": rel.intersect, "+": rel.union, "-": rel.difference}[op]
            return fn(evaluate(left, env), evaluate(right, env))
    raise TypeError(f"not an algebra expression: {expr!r}")


def references(expr: AlgebraExpr) -> set[str]:
    """Names of every stored relation the expression reads."""
    match expr:
        case Ref(name):
            return {name}
        case Join(parts):
            return set().union(*(references(p) for p in parts))
        case BinOp(_, left, right):
            return references(left) | references(right)
        case _:
            return references(expr.source)


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<join>\|x\|)
      | (?P<quoted>'[^']*')
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*|[0-9]+)
      | (?P<sym>[()\[\]{}:,~&+\-])
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = len(text) - len(text[pos:].lstrip())
            raise ETRSyntaxError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _AlgebraParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def error(self, message: str):
        kind, value, pos = self.peek()
        found = "end of input" if kind == "eof" else repr(value)
        raise ETRSyntaxError(f"{message}, found {found}", self.text, pos)

    def accept(self, value: str) -> bool:
        kind, v, _ = self.peek()
        if kind in ("sym", "join") and v == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str):
        if not self.accept(value):
            self.error(f"expected {value!r}")

    def name(self, what: str = "name") -> str:
        kind, v, _ = self.peek()
        if kind != "name":
            self.error(f"expected {what}")
        self.i += 1
        return v

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "eof":
            self.error("unexpected token")
        return node

    def expr(self):
        node = self.inter()
        while True:
            for op in ("+", "-"):
                if self.accept(op):
                    node = BinOp(op, node, self.inter())
                    break
            else:
                return node

    def inter(self):
        node = self.joined()
        while self.accept("&"):
            node = BinOp("&", node, self.joined())
        return node

    def joined(self):
        parts = [self.unary()]
        while self.accept("|x|"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else Join(tuple(parts))

    def unary(self):
        if self.accept("~"):
            return Complement(self.unary())
        return self.postfix()

    def postfix(self):
        node = self.primary()
        while self.accept(":"):
            node = Filter(node, self.pattern())
        return node

    def primary(self):
        kind, v, _ = self.peek()
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name" and v in ("project", "cyl") and self.tokens[self.i + 1][1] == "{":
            self.i += 1
            self.expect("{")
            if v == "project":
                idx = self._list("}", lambda: self.name("index"))
            else:
                idx = self._list("}", self._typed_index)
            self.expect("(")
            src = self.expr()
            self.expect(")")
            if v == "project":
                return Project(src, frozenset(idx))
            return Cylinder(src, Signature(idx))
        if kind == "name":
            self.i += 1
            return Ref(v)
        self.error("expected a relation, '(' , 'project{' or 'cyl{'")

    def _typed_index(self):
        i = self.name("index")
        self.expect(":")
        return i, self.name("domain name")

    def _list(self, close: str, item):
        items = []
        if self.accept(close):
            return items
        items.append(item())
        while self.accept(","):
            items.append(item())
        self.expect(close)
        return items

    def term(self):
        kind, v, _ = self.peek()
        if kind == "quoted":
            self.i += 1
            return Quoted(v[1:-1])
        if kind == "name" and not v.isdigit():
            self.i += 1
            return Indeterminate(v)
        self.error("expected an indeterminate or a quoted literal")

    def pattern(self) -> FiniteMap:
        if self.accept("["):
            terms = self._list("]", self.term)
            return FiniteMap(zip(iota(len(terms)), terms))
        if self.accept("{"):
            def entry():
                i = self.name("index")
                self.expect(":")
                return i, self.term()
            pairs = self._list("}", entry)
            if len({i for i, _ in pairs}) != len(pairs):
                self.error("index repeated in pattern")
            return FiniteMap(pairs)
        self.error("expected a pattern '[...]' or '{...}'")


def parse_algebra(text: str, known: Mapping[str, object] | None = None) -> AlgebraExpr:
    """Parse an algebra query; with ``known`` given, reject unknown relation names."""
    expr = _AlgebraParser(text).parse()
    if known is not None:
        missing = sorted(references(expr) - set(known))
        if missing:
            raise UnknownRelation(f"unknown relation {missing[0]!r}")
    return expr


def filter_node(source, terms) -> Filter:
    """Build a :class:`Filter` over ``iota(n)`` from a list of terms (strings are indeterminates)."""
    conv = [Indeterminate(t) if isinstance(t, str) else t for t in terms]
    return Filter(source, FiniteMap(zip(iota(len(conv)), conv)))
