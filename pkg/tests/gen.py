"""Seeded random instances for property checks with exact iteration counts."""

from __future__ import annotations

import random

from etr.core import Domain, DomainRegistry, Signature, iter_cart
from etr.logic import And, Atom, Const, Exists, Interpretation, Not, Var
from etr.relation import Relation

INDEX_POOL = ("a", "b", "c", "d")
VAR_POOL = ("x", "y", "z", "w")


def registry(rng: random.Random, max_domains: int = 2, max_size: int = 3) -> DomainRegistry:
    n = rng.randint(1, max_domains)
    return DomainRegistry(
        Domain(f"D{k}", tuple(f"v{k}_{j}" for j in range(rng.randint(1, max_size)))) for k in range(n))


def typing(rng: random.Random, reg: DomainRegistry, pool=INDEX_POOL) -> dict[str, str]:
    """A global index -> domain map; any two restrictions of it are summable."""
    doms = list(reg)
    return {i: rng.choice(doms) for i in pool}


def signature(rng: random.Random, glob: dict[str, str], max_indexes: int = 4) -> Signature:
    k = rng.randint(0, min(max_indexes, len(glob)))
    return Signature((i, glob[i]) for i in rng.sample(sorted(glob), k))


def relation(rng: random.Random, sig: Signature, reg: DomainRegistry, max_extent: int = 10) -> Relation:
    cart = list(iter_cart(sig, reg))
    k = rng.randint(0, min(max_extent, len(cart)))
    return Relation(sig, rng.sample(cart, k))


def interpretation(rng: random.Random, max_domain: int = 4, max_preds: int = 3, max_arity: int = 3) -> Interpretation:
    dom = Domain("D", tuple(f"e{j}" for j in range(rng.randint(1, max_domain))))
    preds = {}
    arity = {}
    for k in range(rng.randint(1, max_preds)):
        name = f"p{k}"
        arity[name] = rng.randint(1, max_arity)
        density = rng.random()
        cart = iter_cart(Signature((str(i), "D") for i in range(arity[name])), DomainRegistry([dom]))
        preds[name] = [tuple(t[str(i)].literal for i in range(arity[name])) for t in cart if rng.random() < density]
    return Interpretation.build(dom, preds, arity)


def formula(rng: random.Random, m: Interpretation, depth: int = 4, variables=VAR_POOL):
    names = sorted(m.predicates)
    consts = list(m.domain.values)

    def term():
        if rng.random() < 0.15:
            return Const(rng.choice(consts))
        return Var(rng.choice(variables))

    def atom():
        p = rng.choice(names)
        return Atom(p, tuple(term() for _ in range(len(m.predicates[p].signature))))

    def go(d):
        if d == 0:
            return atom()
        kind = rng.choice(("atom", "and", "exists", "not"))
        if kind == "atom":
            return atom()
        if kind == "and":
            return And(tuple(go(d - 1) for _ in range(rng.randint(2, 3))))
        if kind == "exists":
            return Exists(tuple(rng.sample(variables, rng.randint(1, 2))), go(d - 1))
        return Not(go(d - 1))

    return go(rng.randint(0, depth))
