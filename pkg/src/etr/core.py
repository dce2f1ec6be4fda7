"""Functions as values: finite maps, restriction, sum, composition,
domains with their sorting function, signatures and Cartesian products.

Indexes are strings. The numeric index set ``iota(n)`` is encoded as the
strings ``"0" .. "n-1"`` so that role names and positions share one
representation; :func:`index_key` orders numeric indexes by integer value
and everything else lexicographically.
"""

from __future__ import annotations

import itertools
from collections.abc import Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Any, TypeVar

from .errors import (
    ComposeKeyMissing,
    EmptyDomain,
    NotSummable,
    OverlappingDomains,
    UnknownDomain,
    UnknownLiteral,
)

Index = str
DomainId = str
Literal = str | int


def index_key(index: Index) -> tuple:
    if index.isdigit():
        return (0, int(index), index)
    return (1, 0, index)


def sorted_indexes(indexes: Iterable[Index]) -> list[Index]:
    return sorted(indexes, key=index_key)


def iota(n: int) -> tuple[Index, ...]:
    """The numeric index set {0, ..., n-1} in string encoding."""
    return tuple(str(i) for i in range(n))


@dataclass(frozen=True)
class Value:
    """A literal tagged with the domain that owns it."""

    domain: DomainId
    literal: Literal

    def __str__(self) -> str:
        return str(self.literal)


class FiniteMap(Mapping):
    """Immutable, hashable finite function keyed by indexes.

    Equality is map equality: insertion order never matters. Subclasses
    only narrow what the values mean.
    """

    __slots__ = ("_data", "_hash")

    def __init__(self, entries: Mapping | Iterable[tuple[Any, Any]] = ()):
        self._data = dict(entries)
        self._hash: int | None = None

    def __getitem__(self, key):
        return self._data[key]

    def __iter__(self) -> Iterator:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, key) -> bool:
        return key in self._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMap):
            return NotImplemented
        return type(self) is type(other) and self._data == other._data

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self) -> str:
        body = ", ".join(f"{k!r}: {self._data[k]!r}" for k in self.sorted_keys())
        return f"{type(self).__name__}({{{body}}})"

    def sorted_keys(self) -> list:
        try:
            return sorted_indexes(self._data)
        except (AttributeError, TypeError):
            return sorted(self._data, key=repr)

    @property
    def index_set(self) -> frozenset:
        return frozenset(self._data)


class Tuple(FiniteMap):
    """A data row: index -> :class:`Value`."""

    __slots__ = ()


class Signature(FiniteMap):
    """A typing row: index -> domain id."""

    __slots__ = ()


M = TypeVar("M", bound=FiniteMap)


def seq(*values: Value) -> Tuple:
    """Build a tuple over ``iota(len(values))``."""
    return Tuple(zip(iota(len(values)), values))


def restrict(f: M, indexes: Iterable) -> M:
    """Restriction of ``f`` to ``keys(f) & indexes``."""
    keep = set(indexes)
    return type(f)((k, v) for k, v in f.items() if k in keep)


def summable(f0: Mapping, f1: Mapping) -> bool:
    small, large = (f0, f1) if len(f0) <= len(f1) else (f1, f0)
    return all(large[k] == v for k, v in small.items() if k in large)


def function_sum(f0: M, f1: M) -> M:
    """The sum of two functions that agree on their shared indexes."""
    data = dict(f0.items())
    for k, v in f1.items():
        if k in data and data[k] != v:
            raise NotSummable(k, data[k], v)
        data[k] = v
    return type(f0)(data)


def compose(outer: Mapping[Hashable, Any], inner: Mapping, into: type[M] = Tuple) -> M:
    """``outer o inner``: maps each index ``i`` of ``inner`` to ``outer[inner[i]]``."""
    out = {}
    for i, x in inner.items():
        try:
            out[i] = outer[x]
        except KeyError:
            raise ComposeKeyMissing(x) from None
    return into(out)


@dataclass(frozen=True)
class Domain:
    id: DomainId
    values: tuple[Literal, ...]

    def __post_init__(self):
        if not self.id:
            raise ValueError("domain id must be a non-empty string")
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise EmptyDomain(f"domain {self.id!r} is empty")
        if len({str(v) for v in self.values}) != len(self.values):
            raise ValueError(f"domain {self.id!r} has duplicate literals")

    def __len__(self) -> int:
        return len(self.values)

    def members(self) -> tuple[Value, ...]:
        return tuple(Value(self.id, v) for v in self.values)

    def __contains__(self, literal) -> bool:
        return str(literal) in {str(v) for v in self.values}


class DomainRegistry(Mapping):
    """A set of pairwise disjoint, non-empty, finite domains.

    Literals are compared by their string form when checking disjointness,
    so ``5`` and ``"5"`` count as the same literal.
    """

    def __init__(self, domains: Iterable[Domain] = ()):
        self._domains: dict[DomainId, Domain] = {}
        self._owner: dict[str, tuple[DomainId, Literal]] = {}
        for d in domains:
            if d.id in self._domains:
                raise ValueError(f"domain {d.id!r} registered twice")
            for lit in d.values:
                key = str(lit)
                if key in self._owner:
                    raise OverlappingDomains(lit, self._owner[key][0], d.id)
                self._owner[key] = (d.id, lit)
            self._domains[d.id] = d

    @classmethod
    def of(cls, **domains: Iterable[Literal]) -> DomainRegistry:
        return cls(Domain(name, tuple(vals)) for name, vals in domains.items())

    def __getitem__(self, domain_id: DomainId) -> Domain:
        try:
            return self._domains[domain_id]
        except KeyError:
            raise UnknownDomain(domain_id) from None

    def __iter__(self):
        return iter(self._domains)

    def __len__(self) -> int:
        return len(self._domains)

    def __contains__(self, domain_id) -> bool:
        return domain_id in self._domains

    def __repr__(self) -> str:
        return f"DomainRegistry({list(self._domains.values())!r})"

    def sort_value(self, literal: Literal) -> DomainId:
        """The sorting function: the unique domain containing ``literal``."""
        try:
            return self._owner[str(literal)][0]
        except KeyError:
            raise UnknownLiteral(literal) from None

    def value(self, literal: Literal) -> Value:
        """Tag ``literal`` with its owning domain, normalising its form."""
        try:
            dom, lit = self._owner[str(literal)]
        except KeyError:
            raise UnknownLiteral(literal) from None
        return Value(dom, lit)

    def sorting_map(self) -> dict[Value, DomainId]:
        """The sorting function as a finite map over every registered value."""
        return {Value(d.id, lit): d.id for d in self._domains.values() for lit in d.values}


def signature_of(t: Tuple) -> Signature:
    return Signature((i, v.domain) for i, v in t.items())


def is_sorted_by(t: Tuple, sig: Signature) -> bool:
    if len(t) != len(sig):
        return False
    for i, v in t.items():
        if i not in sig or sig[i] != v.domain:
            return False
    return True


def iter_cart(sig: Signature, registry: Mapping[DomainId, Domain]) -> Iterator[Tuple]:
    """Every tuple sorted by ``sig``, in declaration order of the domains."""
    indexes = sorted_indexes(sig)
    columns = []
    for i in indexes:
        if sig[i] not in registry:
            raise UnknownDomain(sig[i])
        columns.append(registry[sig[i]].members())
    for combo in itertools.product(*columns):
        yield Tuple(zip(indexes, combo))


def cart_enumerate(sig: Signature, registry: Mapping[DomainId, Domain]) -> frozenset[Tuple]:
    return frozenset(iter_cart(sig, registry))


def cart_size(sig: Signature, registry: Mapping[DomainId, Domain]) -> int:
    n = 1
    for dom in sig.values():
        if dom not in registry:
            raise UnknownDomain(dom)
        n *= len(registry[dom])
    return n
