"""Database schemes and instances, and their flat-file formats.

A scheme file is YAML::

    domains:
      person: [mary, john, alan, joan]
      quantity: {range: [0, 20]}        # inclusive integer range
    attributes:                          # the global typing: attribute -> domain
      parent: person
      child: person
    relations:                           # relation name -> ordered attributes
      pc: [parent, child]
    constants:                           # optional; symbol -> literal or {domain, literal}
      boss: mary
    builtins:                            # optional; computed comparison relations
      - {name: leq, kind: leq, attributes: [rqty, pqty]}

Every scalar is read as a string. Relation data live in one delimited file
per relation, ``<name>.csv``, whose first row names the attributes in any
order.
"""

from __future__ import annotations

import csv
import io
import operator
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .core import Domain, DomainId, DomainRegistry, Signature, Tuple, Value, iter_cart, iota
from .errors import (
    DuplicateRelation,
    HeaderMismatch,
    MixedDomains,
    NonIntegerDomain,
    ParseError,
    SemanticError,
    UnknownDomainRef,
    UnknownRelation,
    ValueOutOfDomain,
)
from .logic import Interpretation
from .relation import Relation

BUILTIN_KINDS: dict[str, Callable[[int, int], bool]] = {
    "leq": operator.le,
    "lt": operator.lt,
    "eq": operator.eq,
    "neq": operator.ne,
}


class UnknownAttribute(SemanticError):
    pass


@dataclass(frozen=True)
class BuiltinDecl:
    name: str
    kind: str
    attributes: tuple[str, str]

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if self.kind not in BUILTIN_KINDS:
            raise ParseError(f"builtin {self.name!r}: unknown kind {self.kind!r}, expected one of {sorted(BUILTIN_KINDS)}")
        if len(self.attributes) != 2 or self.attributes[0] == self.attributes[1]:
            raise ParseError(f"builtin {self.name!r} needs exactly two distinct attributes")


@dataclass(frozen=True)
class Scheme:
    domains: tuple[Domain, ...]
    attributes: Mapping[str, DomainId]
    relations: Mapping[str, tuple[str, ...]]
    constants: Mapping[str, tuple[DomainId, str]] = field(default_factory=dict)
    builtins: tuple[BuiltinDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(self.domains))
        object.__setattr__(self, "builtins", tuple(self.builtins))
        object.__setattr__(self, "relations", {k: tuple(v) for k, v in self.relations.items()})
        registry = DomainRegistry(self.domains)
        object.__setattr__(self, "registry", registry)
        for attr, dom in self.attributes.items():
            if dom not in registry:
                raise UnknownDomainRef(f"attribute {attr!r} refers to undeclared domain {dom!r}")
        for name, attrs in self.relations.items():
            self._check_attrs(name, attrs)
        names = set(self.relations)
        for b in self.builtins:
            if b.name in names:
                raise DuplicateRelation(f"relation {b.name!r} declared twice")
            names.add(b.name)
            self._check_attrs(b.name, b.attributes)
            d0, d1 = (self.attributes[a] for a in b.attributes)
            if d0 != d1:
                raise NonIntegerDomain(f"builtin {b.name!r} compares attributes over different domains {d0!r}, {d1!r}")
        for sym, (dom, lit) in self.constants.items():
            if dom not in registry:
                raise UnknownDomainRef(f"constant {sym!r} refers to undeclared domain {dom!r}")
            if lit not in registry[dom]:
                raise ValueOutOfDomain(0, sym, lit)

    def _check_attrs(self, name: str, attrs: tuple[str, ...]) -> None:
        if len(set(attrs)) != len(attrs):
            raise ParseError(f"relation {name!r} lists an attribute twice")
        for a in attrs:
            if a not in self.attributes:
                raise UnknownAttribute(f"relation {name!r} uses undeclared attribute {a!r}")

    def attributes_of(self, name: str) -> tuple[str, ...]:
        if name in self.relations:
            return self.relations[name]
        for b in self.builtins:
            if b.name == name:
                return b.attributes
        raise UnknownRelation(f"unknown relation {name!r}")

    def signature(self, name: str) -> Signature:
        """The global typing restricted to the relation's attributes."""
        return Signature((a, self.attributes[a]) for a in self.attributes_of(name))


def relation_where(signature: Signature, predicate: Callable[[Tuple], bool], registry) -> Relation:
    """``{t in cart(signature) | predicate(t)}``."""
    return Relation._trusted(signature, (t for t in iter_cart(signature, registry) if predicate(t)))


def _as_int(dom: Domain) -> dict[str, int]:
    try:
        return {str(v): int(v) for v in dom.values}
    except ValueError:
        raise NonIntegerDomain(f"domain {dom.id!r} has non-integer literals") from None


def materialize_builtin(decl: BuiltinDecl, scheme: Scheme) -> Relation:
    a, b = decl.attributes
    dom = scheme.registry[scheme.attributes[a]]
    ints = _as_int(dom)
    cmp = BUILTIN_KINDS[decl.kind]
    return relation_where(scheme.signature(decl.name),
                          lambda t: cmp(ints[str(t[a])], ints[str(t[b])]), scheme.registry)


@dataclass(frozen=True)
class Instance:
    scheme: Scheme
    extents: Mapping[str, Relation]

    @classmethod
    def empty(cls, scheme: Scheme) -> Instance:
        extents = {name: Relation.empty(scheme.signature(name)) for name in scheme.relations}
        for b in scheme.builtins:
            extents[b.name] = materialize_builtin(b, scheme)
        return cls(scheme, extents)

    @property
    def registry(self) -> DomainRegistry:
        return self.scheme.registry

    @property
    def relations(self) -> Mapping[str, Relation]:
        return self.extents

    def lookup(self, name: str) -> Relation:
        try:
            return self.extents[name]
        except KeyError:
            raise UnknownRelation(f"unknown relation {name!r}") from None

    def index_order(self, name: str) -> tuple[str, ...]:
        return self.scheme.attributes_of(name)

    def with_extent(self, name: str, r: Relation) -> Instance:
        if name not in self.scheme.relations:
            raise UnknownRelation(f"unknown relation {name!r}")
        if r.signature != self.scheme.signature(name):
            raise HeaderMismatch(f"relation {name!r} must have signature {self.scheme.signature(name)!r}")
        return replace(self, extents={**self.extents, name: r})


# -- scheme files -------------------------------------------------------------

class _StrictLoader(yaml.BaseLoader):
    """All scalars as strings; duplicate mapping keys are errors."""


def _construct_mapping(loader, node, deep=False):
    seen = set()
    for key_node, _ in node.value:
        key = loader.construct_object(key_node, deep=deep)
        if key in seen:
            mark = key_node.start_mark
            raise DuplicateRelation(f"key {key!r} repeated (line {mark.line + 1})")
        seen.add(key)
    return yaml.BaseLoader.construct_mapping(loader, node, deep)


_StrictLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise ParseError(message)


def _domain_values(name: str, spec) -> tuple[str, ...]:
    if isinstance(spec, list):
        _need(all(isinstance(v, str) for v in spec), f"domain {name!r}: literals must be scalars")
        return tuple(spec)
    _need(isinstance(spec, dict) and set(spec) == {"range"} and isinstance(spec["range"], list)
          and len(spec["range"]) == 2, f"domain {name!r}: expected a list of literals or {{range: [lo, hi]}}")
    try:
        lo, hi = (int(x) for x in spec["range"])
    except ValueError:
        raise ParseError(f"domain {name!r}: range bounds must be integers") from None
    return tuple(str(v) for v in range(lo, hi + 1))


def scheme_from_dict(doc) -> Scheme:
    _need(isinstance(doc, dict), "scheme must be a mapping")
    unknown = set(doc) - {"domains", "attributes", "relations", "constants", "builtins"}
    _need(not unknown, f"unknown scheme sections: {sorted(unknown)}")
    doms = doc.get("domains") or {}
    attrs = doc.get("attributes") or {}
    rels = doc.get("relations") or {}
    _need(isinstance(doms, dict) and isinstance(attrs, dict) and isinstance(rels, dict),
          "domains, attributes and relations must be mappings")
    domains = []
    for name, spec in doms.items():
        try:
            domains.append(Domain(name, _domain_values(name, spec)))
        except ValueError as e:
            raise ParseError(str(e)) from None
    for name, attr_list in rels.items():
        _need(isinstance(attr_list, list), f"relation {name!r}: expected a list of attributes")
    consts = {}
    const_doc = doc.get("constants") or {}
    _need(isinstance(const_doc, dict), "constants must be a mapping")
    registry = None
    for sym, spec in const_doc.items():
        if isinstance(spec, dict):
            _need(set(spec) == {"domain", "literal"}, f"constant {sym!r}: expected {{domain, literal}}")
            consts[sym] = (spec["domain"], spec["literal"])
        else:
            registry = registry or DomainRegistry(domains)
            consts[sym] = (registry.sort_value(spec), spec)
    builtins = []
    for b in doc.get("builtins") or []:
        _need(isinstance(b, dict) and set(b) == {"name", "kind", "attributes"},
              "builtin entries need exactly name, kind and attributes")
        builtins.append(BuiltinDecl(b["name"], b["kind"], tuple(b["attributes"])))
    return Scheme(tuple(domains), dict(attrs), {k: tuple(v) for k, v in rels.items()}, consts, tuple(builtins))


def parse_scheme(text: str) -> Scheme:
    try:
        doc = yaml.load(text, Loader=_StrictLoader)
    except yaml.YAMLError as e:
        raise ParseError(f"scheme is not valid YAML: {e}") from None
    return scheme_from_dict(doc)


def load_scheme(path: str | Path) -> Scheme:
    return parse_scheme(Path(path).read_text(encoding="utf-8"))


def scheme_to_dict(scheme: Scheme) -> dict:
    doc: dict = {
        "domains": {d.id: [str(v) for v in d.values] for d in scheme.domains},
        "attributes": dict(scheme.attributes),
        "relations": {k: list(v) for k, v in scheme.relations.items()},
    }
    if scheme.constants:
        doc["constants"] = {s: {"domain": d, "literal": lit} for s, (d, lit) in scheme.constants.items()}
    if scheme.builtins:
        doc["builtins"] = [{"name": b.name, "kind": b.kind, "attributes": list(b.attributes)} for b in scheme.builtins]
    return doc


def dump_scheme(scheme: Scheme) -> str:
    return yaml.safe_dump(scheme_to_dict(scheme), sort_keys=False, default_flow_style=None, allow_unicode=True)


# -- data files ---------------------------------------------------------------

def parse_relation(instance: Instance, name: str, text: str, delimiter: str = ",") -> Instance:
    scheme = instance.scheme
    if name not in scheme.relations:
        raise UnknownRelation(f"unknown relation {name!r}")
    expected = scheme.relations[name]
    rows = [r for r in csv.reader(io.StringIO(text), delimiter=delimiter) if r]
    if not rows:
        raise ParseError(f"{name}: missing header row")
    header = [h.strip() for h in rows[0]]
    if sorted(header) != sorted(expected) or len(set(header)) != len(header):
        raise HeaderMismatch(f"{name}: header {header} does not match attributes {list(expected)}")
    sig = scheme.signature(name)
    domains = {a: scheme.registry[sig[a]] for a in header}
    lookup = {a: {str(v): v for v in d.values} for a, d in domains.items()}
    extent = set()
    for n, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise ParseError(f"{name}: row {n} has {len(row)} fields, expected {len(header)}")
        t = {}
        for a, cell in zip(header, row):
            cell = cell.strip()
            if cell not in lookup[a]:
                raise ValueOutOfDomain(n, a, cell)
            t[a] = Value(sig[a], lookup[a][cell])
        extent.add(Tuple(t))
    return instance.with_extent(name, Relation._trusted(sig, extent))


def load_relation(instance: Instance, name: str, path: str | Path, delimiter: str = ",") -> Instance:
    return parse_relation(instance, name, Path(path).read_text(encoding="utf-8"), delimiter)


def dump_relation(instance: Instance, name: str, delimiter: str = ",") -> str:
    attrs = instance.scheme.attributes_of(name)
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(attrs)
    w.writerows(sorted([str(t[a]) for a in attrs] for t in instance.lookup(name).extent))
    return buf.getvalue()


def load_instance(scheme_path: str | Path, data_dir: str | Path | None = None, delimiter: str = ",") -> Instance:
    """Load a scheme and every ``<relation>.csv`` found in ``data_dir``; missing files mean empty extents."""
    inst = Instance.empty(load_scheme(scheme_path))
    if data_dir is not None:
        for name in inst.scheme.relations:
            path = Path(data_dir) / f"{name}.csv"
            if path.exists():
                inst = load_relation(inst, name, path, delimiter)
    return inst


def save_instance(instance: Instance, directory: str | Path, delimiter: str = ",") -> Path:
    """Write ``scheme.yaml`` and one data file per stored relation; returns the scheme path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    scheme_path = directory / "scheme.yaml"
    scheme_path.write_text(dump_scheme(instance.scheme), encoding="utf-8")
    for name in instance.scheme.relations:
        (directory / f"{name}.csv").write_text(dump_relation(instance, name, delimiter), encoding="utf-8")
    return scheme_path


# -- bridge to the logic front end --------------------------------------------

def as_interpretation(instance: Instance, domain: str | None = None,
                      needed: Iterable[str] | None = None) -> Interpretation:
    """View the relations over one domain as predicates indexed ``0..k-1``.

    Relations spanning other domains are left out; asking for one of them
    through ``needed`` raises :class:`MixedDomains`.
    """
    scheme = instance.scheme
    if domain is None:
        if len(scheme.domains) != 1:
            raise MixedDomains(
                f"the instance declares {len(scheme.domains)} domains; the logic front end needs a single "
                "domain (choose one, or use the algebra front end)")
        domain = scheme.domains[0].id
    dom = scheme.registry[domain]
    preds = {}
    excluded = set()
    for name, r in instance.extents.items():
        attrs = scheme.attributes_of(name)
        if any(scheme.attributes[a] != domain for a in attrs):
            excluded.add(name)
            continue
        renumber = dict(zip(attrs, iota(len(attrs))))
        preds[name] = Relation._trusted(
            Signature((i, domain) for i in renumber.values()),
            (Tuple((renumber[a], v) for a, v in t.items()) for t in r.extent))
    for name in needed or ():
        if name in excluded:
            raise MixedDomains(f"relation {name!r} spans domains other than {domain!r}; use the algebra front end")
    consts = {s: Value(d, lit) for s, (d, lit) in scheme.constants.items() if d == domain}
    return Interpretation(dom, preds, consts)
