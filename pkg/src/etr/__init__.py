"""An in-memory engine for relations over arbitrary index sets, with a
predicate-calculus query language compiled to relational algebra."""

from .core import (
    Domain,
    DomainRegistry,
    Signature,
    Tuple,
    Value,
    cart_enumerate,
    compose,
    function_sum,
    iota,
    restrict,
    seq,
    signature_of,
)
from .relation import (
    Ground,
    Indeterminate,
    Pattern,
    Relation,
    complement,
    cylinder,
    difference,
    filter,
    intersect,
    join,
    match_tuple,
    project,
    rename,
    union,
)

__version__ = "0.1.0"

__all__ = [
    "Domain", "DomainRegistry", "Signature", "Tuple", "Value", "cart_enumerate", "compose", "function_sum",
    "iota", "restrict", "seq", "signature_of",
    "Ground", "Indeterminate", "Pattern", "Relation", "complement", "cylinder", "difference", "filter",
    "intersect", "join", "match_tuple", "project", "rename", "union",
]
