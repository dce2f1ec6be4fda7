"""Predicate calculus over a finite single-domain interpretation.

A formula gets a meaning two independent ways:

* :func:`denote_oracle` enumerates every assignment of domain elements to
  the free variables and keeps those that satisfy the formula under the
  usual recursive satisfaction rules (:func:`satisfies`).
* :func:`compile` translates the formula into an algebra expression
  (atoms become filterings, conjunctions joins, existentials projections,
  negations complements) which :func:`evaluate` runs on relations.

Both produce a relation over the formula's free variables, and they must
agree on every formula.

Concrete syntax::

    formula  := "exists" var+ "." formula | conj
    conj     := unary ("&" unary)*
    unary    := "!" unary | "exists" var+ "." formula | primary
    primary  := atom | "(" formula ")"
    atom     := pred "(" term ("," term)* ")"
    term     := var | "'" literal "'"

``!`` binds tighter than ``&``; the body of ``exists`` extends as far right
as possible.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from . import algebra
from .algebra import AlgebraExpr, Complement, Join, Project, Ref
from .core import Domain, DomainRegistry, FiniteMap, Signature, Tuple, Value, iota
from .errors import (
    ArityMismatch,
    ETRSyntaxError,
    InvalidRelation,
    UnboundVariable,
    UnknownConstant,
    UnknownPredicate,
)
from .relation import Ground, Indeterminate, Relation


# -- syntax -------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    symbol: str


LogicTerm = Var | Const


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[LogicTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class And:
    conjuncts: tuple

    def __post_init__(self):
        object.__setattr__(self, "conjuncts", tuple(self.conjuncts))
        if not self.conjuncts:
            raise ValueError("a conjunction needs at least one conjunct")


@dataclass(frozen=True)
class Exists:
    bound: tuple[str, ...]
    body: object

    def __post_init__(self):
        object.__setattr__(self, "bound", tuple(self.bound))
        if not self.bound:
            raise ValueError("exists needs at least one bound variable")
        if len(set(self.bound)) != len(self.bound):
            raise ValueError(f"variable bound twice in exists {self.bound}")


@dataclass(frozen=True)
class Not:
    body: object


Formula = Atom | And | Exists | Not


def free_vars(f: Formula) -> tuple[str, ...]:
    """Free variables in order of first occurrence."""
    seen: dict[str, None] = {}

    def walk(g, bound: frozenset):
        match g:
            case Atom(_, args):
                for a in args:
                    if isinstance(a, Var) and a.name not in bound:
                        seen.setdefault(a.name)
            case And(conjuncts):
                for c in conjuncts:
                    walk(c, bound)
            case Exists(names, body):
                walk(body, bound | set(names))
            case Not(body):
                walk(body, bound)
            case _:
                raise TypeError(f"not a formula: {g!r}")

    walk(f, frozenset())
    return tuple(seen)


def format_formula(f: Formula) -> str:
    """Canonical concrete syntax; ``parse_formula(format_formula(f)) == f``."""
    match f:
        case Atom(pred, args):
            terms = ", ".join(a.name if isinstance(a, Var) else f"'{a.symbol}'" for a in args)
            return f"{pred}({terms})"
        case And(conjuncts):
            return " & ".join(
                f"({format_formula(c)})" if isinstance(c, (And, Exists)) else format_formula(c)
                for c in conjuncts)
        case Exists(bound, body):
            return f"exists {' '.join(bound)}. {format_formula(body)}"
        case Not(body):
            inner = format_formula(body)
            return f"!({inner})" if isinstance(body, (And, Exists)) else f"!{inner}"
    raise TypeError(f"not a formula: {f!r}")


_LEX = re.compile(
    r"""\s*(?:
        (?P<quoted>'[^']*')
      | (?P<ident>[a-z][a-zA-Z0-9_]*)
      | (?P<sym>[()&!.,])
      | (?P<bad>\S)
    )""",
    re.VERBOSE,
)


class _FormulaParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while text[pos:].strip():
            m = _LEX.match(text, pos)
            kind = m.lastgroup
            start = m.start(kind)
            if kind == "bad":
                if re.match(r"[A-Z0-9]", text[start]):
                    word = re.match(r"[A-Za-z0-9_]+", text[start:]).group()
                    raise ETRSyntaxError(f"constant {word!r} must be quoted ('{word}')", text, start)
                raise ETRSyntaxError(f"unexpected character {text[start]!r}", text, start)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def error(self, message: str):
        kind, value, pos = self.peek()
        found = "end of input" if kind == "eof" else repr(value)
        raise ETRSyntaxError(f"{message}, found {found}", self.text, pos)

    def accept(self, sym: str) -> bool:
        kind, v, _ = self.peek()
        if kind == "sym" and v == sym:
            self.i += 1
            return True
        return False

    def expect(self, sym: str):
        if not self.accept(sym):
            self.error(f"expected {sym!r}")

    def at_keyword(self) -> bool:
        kind, v, _ = self.peek()
        return kind == "ident" and v == "exists" and self.tokens[self.i + 1][1] != "("

    def parse(self) -> Formula:
        f = self.formula()
        if self.peek()[0] != "eof":
            self.error("unexpected token")
        return f

    def formula(self) -> Formula:
        if self.at_keyword():
            return self.quantified()
        return self.conj()

    def quantified(self) -> Formula:
        self.i += 1
        names = []
        while self.peek()[0] == "ident":
            names.append(self.peek()[1])
            self.i += 1
        if not names:
            self.error("expected a variable after 'exists'")
        if len(set(names)) != len(names):
            self.error("variable bound twice")
        self.expect(".")
        return Exists(tuple(names), self.formula())

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        if self.at_keyword():
            return self.quantified()
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self) -> Atom:
        kind, pred, _ = self.peek()
        if kind != "ident":
            self.error("expected a predicate")
        self.i += 1
        self.expect("(")
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        self.expect(")")
        return Atom(pred, tuple(args))

    def term(self) -> LogicTerm:
        kind, v, _ = self.peek()
        if kind == "ident":
            self.i += 1
            return Var(v)
        if kind == "quoted":
            self.i += 1
            return Const(v[1:-1])
        self.error("expected a variable or a quoted constant")


def parse_formula(text: str) -> Formula:
    return _FormulaParser(text).parse()


# -- interpretations ----------------------------------------------------------

@dataclass(frozen=True)
class Interpretation:
    """A domain, predicate meanings over ``iota(k) -> D``, and constant meanings.

    A constant symbol without an explicit entry means the identically
    named literal of the domain.
    """

    domain: Domain
    predicates: Mapping[str, Relation]
    constants: Mapping[str, Value] = field(default_factory=dict)

    def __post_init__(self):
        for name, r in self.predicates.items():
            sig = Signature((i, self.domain.id) for i in iota(len(r.signature)))
            if r.signature != sig:
                raise InvalidRelation(f"predicate {name!r} must have signature iota(k) -> {self.domain.id}")
        object.__setattr__(self, "registry", DomainRegistry([self.domain]))

    @classmethod
    def build(cls, domain: Domain | tuple[str, Iterable], predicates: Mapping[str, Iterable[Sequence]],
              arity: Mapping[str, int] | None = None, constants: Mapping[str, object] | None = None):
        """Build from literal rows; ``arity`` is needed only for empty predicates."""
        if not isinstance(domain, Domain):
            domain = Domain(domain[0], tuple(domain[1]))
        preds = {}
        for name, rows in predicates.items():
            rows = [tuple(r) for r in rows]
            k = arity[name] if arity and name in arity else len(rows[0])
            preds[name] = Relation.of({i: domain.id for i in iota(k)}, rows)
        consts = {s: Value(domain.id, lit) for s, lit in (constants or {}).items()}
        return cls(domain, preds, consts)

    @property
    def relations(self) -> Mapping[str, Relation]:
        return self.predicates

    def lookup(self, name: str) -> Relation:
        try:
            return self.predicates[name]
        except KeyError:
            raise UnknownPredicate(f"predicate {name!r} is not interpreted") from None

    def constant(self, symbol: str) -> Value:
        if symbol in self.constants:
            return self.constants[symbol]
        if symbol in self.domain:
            return self.registry.value(symbol)
        raise UnknownConstant(f"constant {symbol!r} is not interpreted")

    def check_atom(self, atom: Atom) -> Relation:
        r = self.lookup(atom.predicate)
        if len(r.signature) != len(atom.args):
            raise ArityMismatch(
                f"{atom.predicate} has arity {len(r.signature)}, used with {len(atom.args)} arguments")
        return r


# -- satisfaction semantics (the oracle) --------------------------------------

def satisfies(m: Interpretation, assignment: Mapping[str, Value], f: Formula) -> bool:
    match f:
        case Atom(_, args):
            r = m.check_atom(f)
            vals = []
            for a in args:
                if isinstance(a, Var):
                    if a.name not in assignment:
                        raise UnboundVariable(f"variable {a.name!r} has no value")
                    vals.append(assignment[a.name])
                else:
                    vals.append(m.constant(a.symbol))
            return Tuple(zip(iota(len(vals)), vals)) in r.extent
        case And(conjuncts):
            return all(satisfies(m, assignment, c) for c in conjuncts)
        case Exists(bound, body):
            for combo in itertools.product(m.domain.members(), repeat=len(bound)):
                extended = dict(assignment)
                extended.update(zip(bound, combo))
                if satisfies(m, extended, body):
                    return True
            return False
        case Not(body):
            return not satisfies(m, assignment, body)
    raise TypeError(f"not a formula: {f!r}")


def denote_oracle(m: Interpretation, f: Formula) -> Relation:
    """Meaning of ``f`` by brute force over every assignment to its free variables."""
    xs = free_vars(f)
    sig = Signature((x, m.domain.id) for x in xs)
    extent = []
    for combo in itertools.product(m.domain.members(), repeat=len(xs)):
        a = dict(zip(xs, combo))
        if satisfies(m, a, f):
            extent.append(Tuple(a))
    return Relation(sig, extent)


# -- denotation semantics by compilation --------------------------------------

def compile(f: Formula, m: Interpretation) -> AlgebraExpr:  # noqa: A001
    match f:
        case Atom(pred, args):
            m.check_atom(f)
            terms = [Indeterminate(a.name) if isinstance(a, Var) else Ground(m.constant(a.symbol)) for a in args]
            return algebra.Filter(Ref(pred), FiniteMap(zip(iota(len(terms)), terms)))
        case And(conjuncts):
            parts = tuple(compile(c, m) for c in conjuncts)
            return parts[0] if len(parts) == 1 else Join(parts)
        case Exists(_, body):
            return Project(compile(body, m), frozenset(free_vars(f)))
        case Not(body):
            return Complement(compile(body, m))
    raise TypeError(f"not a formula: {f!r}")


def evaluate(expr: AlgebraExpr, m: Interpretation) -> Relation:
    return algebra.evaluate(expr, m)


def denote(m: Interpretation, f: Formula) -> Relation:
    """Meaning of ``f`` computed through the relational algebra."""
    return evaluate(compile(f, m), m)
