"""Relations as (signature, extent) pairs and the operations on them.

A :class:`Relation` never stores column order: its signature is a finite
map from indexes to domains, and every tuple in its extent is sorted by
that signature. Operations are pure functions returning new relations.

Filtering (``r : p``) is the workhorse. It matches every tuple of ``r``
against a :class:`Pattern` and collects the matching substitutions, so it
covers renaming (bijective patterns), selection on equal components
(repeated indeterminates) and selection on constants (ground terms).
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import reduce

from .core import (
    Domain,
    DomainId,
    FiniteMap,
    Index,
    Signature,
    Tuple,
    Value,
    cart_enumerate,
    cart_size,
    compose,
    function_sum,
    iota,
    is_sorted_by,
    iter_cart,
    restrict,
    signature_of,
    sorted_indexes,
)
from .errors import (
    IncompatiblePattern,
    InvalidRelation,
    NotBijective,
    SignatureMismatch,
)

Registry = Mapping[DomainId, Domain]


@dataclass(frozen=True)
class Relation:
    signature: Signature
    extent: frozenset[Tuple]

    def __post_init__(self):
        if not isinstance(self.signature, Signature):
            object.__setattr__(self, "signature", Signature(self.signature))
        object.__setattr__(self, "extent", frozenset(self.extent))
        for t in self.extent:
            if not is_sorted_by(t, self.signature):
                raise InvalidRelation(f"{t!r} is not sorted by {self.signature!r}")

    @classmethod
    def _trusted(cls, signature: Signature, extent: Iterable[Tuple]) -> Relation:
        # Skips the sortedness check; only for results that are correct by construction.
        obj = object.__new__(cls)
        object.__setattr__(obj, "signature", signature)
        object.__setattr__(obj, "extent", frozenset(extent))
        return obj

    @classmethod
    def of(cls, signature: Mapping[Index, DomainId], rows: Iterable = ()) -> Relation:
        """Build a relation from raw literals.

        Each row is either a mapping ``index -> literal`` or a sequence
        read positionally over ``iota(len(row))``. Literals are tagged with
        the domain the signature assigns to their index.
        """
        sig = Signature(signature)
        extent = []
        for row in rows:
            items = row.items() if isinstance(row, Mapping) else zip(iota(len(row)), row)
            extent.append(Tuple((i, v if isinstance(v, Value) else Value(sig[i], v)) for i, v in items))
        return cls(sig, extent)

    @classmethod
    def empty(cls, signature: Mapping[Index, DomainId]) -> Relation:
        return cls(Signature(signature), ())

    @classmethod
    def full(cls, signature: Mapping[Index, DomainId], registry: Registry) -> Relation:
        sig = Signature(signature)
        return cls._trusted(sig, iter_cart(sig, registry))

    @property
    def indexes(self) -> frozenset[Index]:
        return self.signature.index_set

    def __len__(self) -> int:
        return len(self.extent)

    def __iter__(self):
        return iter(self.extent)

    def __contains__(self, t) -> bool:
        return t in self.extent

    def rows(self) -> list[tuple[str, ...]]:
        """Extent as rendered rows, columns in index order, rows sorted."""
        cols = sorted_indexes(self.signature)
        return sorted(tuple(str(t[i]) for i in cols) for t in self.extent)

    def __repr__(self) -> str:
        cols = sorted_indexes(self.signature)
        head = ", ".join(f"{i}:{self.signature[i]}" for i in cols)
        return f"Relation([{head}], {self.rows()!r})"


# -- boolean operations -------------------------------------------------------

def _same_signature(r0: Relation, r1: Relation, op: str) -> None:
    if r0.signature != r1.signature:
        raise SignatureMismatch(f"{op}: {r0.signature!r} != {r1.signature!r}")


def intersect(r0: Relation, r1: Relation) -> Relation:
    _same_signature(r0, r1, "intersect")
    return Relation._trusted(r0.signature, r0.extent & r1.extent)


def union(r0: Relation, r1: Relation) -> Relation:
    _same_signature(r0, r1, "union")
    return Relation._trusted(r0.signature, r0.extent | r1.extent)


def difference(r0: Relation, r1: Relation) -> Relation:
    _same_signature(r0, r1, "difference")
    return Relation._trusted(r0.signature, r0.extent - r1.extent)


def complement(r: Relation, registry: Registry) -> Relation:
    """Complement within the Cartesian product of ``r``'s signature."""
    return Relation._trusted(r.signature, (t for t in iter_cart(r.signature, registry) if t not in r.extent))


# -- projection, cylinder, join ----------------------------------------------

def project(r: Relation, indexes: Iterable[Index]) -> Relation:
    keep = set(indexes)
    return Relation._trusted(restrict(r.signature, keep), (restrict(t, keep) for t in r.extent))


def cylinder(r: Relation, other: Mapping[Index, DomainId], registry: Registry) -> Relation:
    """Largest relation over ``r.signature + other`` that projects back onto ``r``."""
    sig = function_sum(r.signature, Signature(other))
    fresh = Signature((i, d) for i, d in sig.items() if i not in r.signature)
    cart_size(fresh, registry)  # raises UnknownDomain even when r is empty
    pads = list(iter_cart(fresh, registry))
    return Relation._trusted(sig, (function_sum(t, pad) for t in r.extent for pad in pads))


def join(r0: Relation, r1: Relation, registry: Registry | None = None) -> Relation:
    """Natural join on the shared indexes, computed by hashing.

    Extensionally equal to :func:`join_by_cylinders`; ``registry`` is
    accepted for interface symmetry and never needed.
    """
    sig = function_sum(r0.signature, r1.signature)
    shared = sorted_indexes(r0.indexes & r1.indexes)
    build, probe = (r0, r1) if len(r0) <= len(r1) else (r1, r0)
    table: dict[tuple, list[Tuple]] = {}
    for t in build.extent:
        table.setdefault(tuple(t[i] for i in shared), []).append(t)
    out = []
    for t in probe.extent:
        for u in table.get(tuple(t[i] for i in shared), ()):
            merged = dict(u.items())
            merged.update(t.items())
            out.append(Tuple(merged))
    return Relation._trusted(sig, out)


def join_by_cylinders(r0: Relation, r1: Relation, registry: Registry) -> Relation:
    """Join exactly as defined: the intersection of the two cylinders."""
    return intersect(cylinder(r0, r1.signature, registry), cylinder(r1, r0.signature, registry))


def join_all(relations: Sequence[Relation], registry: Registry | None = None) -> Relation:
    if not relations:
        # identity of join: the non-empty relation over no indexes
        return Relation._trusted(Signature(), [Tuple()])
    return reduce(lambda a, b: join(a, b, registry), relations)


def product(r0: Relation, r1: Relation) -> Relation:
    """Relational product: join of relations with disjoint index sets."""
    if r0.indexes & r1.indexes:
        raise SignatureMismatch(f"product needs disjoint index sets, shared: {sorted(r0.indexes & r1.indexes)}")
    return join(r0, r1)


# -- patterns and filtering ---------------------------------------------------

@dataclass(frozen=True)
class Indeterminate:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Ground:
    value: Value

    def __str__(self) -> str:
        return f"'{self.value}'"


Term = Indeterminate | Ground


def _as_term(x) -> Term:
    if isinstance(x, (Indeterminate, Ground)):
        return x
    if isinstance(x, Value):
        return Ground(x)
    if isinstance(x, str):
        return Indeterminate(x)
    raise TypeError(f"cannot use {x!r} as a pattern term")


@dataclass(frozen=True)
class Pattern:
    """Index -> term map, plus the typing of its indeterminates.

    ``typing`` may name variables that do not occur in ``entries``; those
    range over their whole domain when filtering.
    """

    entries: FiniteMap
    typing: Signature

    def __post_init__(self):
        object.__setattr__(self, "entries", FiniteMap((i, _as_term(t)) for i, t in self.entries.items()))
        if not isinstance(self.typing, Signature):
            object.__setattr__(self, "typing", Signature(self.typing))
        missing = self.variables() - self.typing.index_set
        if missing:
            raise IncompatiblePattern(f"untyped indeterminates: {sorted(missing)}")

    @classmethod
    def over(cls, entries, signature: Mapping[Index, DomainId], extra: Mapping[str, DomainId] | None = None) -> Pattern:
        """Pattern whose typing is read off ``signature`` (so ``typing o p`` = signature).

        ``entries`` is a mapping or a sequence over ``iota(n)``; plain strings
        are indeterminates and :class:`Value` objects are ground terms.
        """
        if not isinstance(entries, Mapping):
            entries = dict(zip(iota(len(entries)), entries))
        typing: dict[str, DomainId] = dict(extra or {})
        for i, term in entries.items():
            term = _as_term(term)
            if i not in signature:
                raise IncompatiblePattern(f"index {i!r} is not in the signature")
            if isinstance(term, Indeterminate):
                prev = typing.setdefault(term.name, signature[i])
                if prev != signature[i]:
                    raise IncompatiblePattern(
                        f"indeterminate {term.name!r} used at domains {prev!r} and {signature[i]!r}")
        return cls(FiniteMap(entries), Signature(typing))

    def variables(self) -> frozenset[str]:
        return frozenset(t.name for t in self.entries.values() if isinstance(t, Indeterminate))

    def is_bijective(self) -> bool:
        names = [t.name for t in self.entries.values() if isinstance(t, Indeterminate)]
        return len(names) == len(self.entries) and len(set(names)) == len(names)

    def inverse(self) -> Pattern:
        if not self.is_bijective():
            raise NotBijective(f"{self!r} has no inverse")
        entries = {t.name: Indeterminate(i) for i, t in self.entries.items()}
        typing = {i: self.typing[t.name] for i, t in self.entries.items()}
        return Pattern(FiniteMap(entries), Signature(typing))

    def check_compatible(self, signature: Mapping[Index, DomainId]) -> None:
        if set(self.entries) != set(signature):
            raise IncompatiblePattern(
                f"pattern indexes {sorted_indexes(self.entries)} != signature indexes {sorted_indexes(signature)}")
        for i, term in self.entries.items():
            dom = self.typing[term.name] if isinstance(term, Indeterminate) else term.value.domain
            if dom != signature[i]:
                raise IncompatiblePattern(f"index {i!r}: pattern term {term} has domain {dom!r}, expected {signature[i]!r}")

    def __str__(self) -> str:
        keys = self.entries.sorted_keys()
        if keys == list(iota(len(keys))):
            return "[" + ",".join(str(self.entries[k]) for k in keys) + "]"
        return "{" + ", ".join(f"{k}: {self.entries[k]}" for k in keys) + "}"


def _match(t: Tuple, p: Pattern) -> dict[str, Value] | None:
    s: dict[str, Value] = {}
    for i, term in p.entries.items():
        v = t[i]
        if isinstance(term, Ground):
            if term.value != v:
                return None
        else:
            bound = s.setdefault(term.name, v)
            if bound != v:
                return None
    return s


def match_tuple(t: Tuple, p: Pattern) -> dict[str, Value] | None:
    """The matching substitution of ``t`` against ``p``, or None.

    The substitution covers exactly the indeterminates occurring in ``p``.
    """
    p.check_compatible(signature_of(t))
    return _match(t, p)


def substitution_map(s: Mapping[str, Value], p: Pattern) -> dict:
    """``s`` keyed by terms, with every ground term mapped to itself, ready for :func:`compose`."""
    out: dict = {Indeterminate(x): v for x, v in s.items()}
    out.update({t: t.value for t in p.entries.values() if isinstance(t, Ground)})
    return out


def filter(r: Relation, p: Pattern, registry: Registry | None = None) -> Relation:  # noqa: A001
    """``r : p`` -- the relation of all matching substitutions, typed by ``p.typing``."""
    p.check_compatible(r.signature)
    used = p.variables()
    matches = set()
    for t in r.extent:
        s = _match(t, p)
        if s is not None:
            matches.add(Tuple(s))
    free = Signature((x, d) for x, d in p.typing.items() if x not in used)
    if free:
        if registry is None:
            raise IncompatiblePattern(f"a registry is needed to range unused variables {sorted(free)}")
        pads = list(iter_cart(free, registry))
        matches = {function_sum(m, pad) for m in matches for pad in pads}
    return Relation._trusted(p.typing, matches)


def rename(r: Relation, p: Pattern) -> Relation:
    """Filtering by a bijective all-indeterminate pattern."""
    if not p.is_bijective():
        raise NotBijective(f"renaming pattern {p} is not a bijection")
    return filter(r, p)


def rename_to(r: Relation, names: Mapping[Index, str]) -> Relation:
    """Rename indexes by an ``old -> new`` map covering every index of ``r``."""
    return rename(r, Pattern.over({i: Indeterminate(n) for i, n in names.items()}, r.signature))


def compose_substitution(s: Mapping[str, Value], p: Pattern) -> Tuple:
    return compose(substitution_map(s, p), p.entries)


__all__ = [
    "Relation",
    "Indeterminate",
    "Ground",
    "Pattern",
    "intersect",
    "union",
    "difference",
    "complement",
    "project",
    "cylinder",
    "join",
    "join_by_cylinders",
    "join_all",
    "product",
    "match_tuple",
    "filter",
    "rename",
    "rename_to",
    "cart_enumerate",
]
