"""Built-in signatures and small factor structures used by the sweeps."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import List, Tuple

from .logic import Signature
from .structures import SET_SIGNATURE, FiniteStructure, ProductModel, product, set_structure

GRAPH_SIGNATURE = Signature(("S",), relations={"R": ("S", "S"), "P": ("S",)},
                            constants={"c": "S"})
FUNC_SIGNATURE = Signature(("S",), relations={"P": ("S",)}, functions={"f": (("S",), "S")},
                           constants={"c": "S"})
TWO_SORTED_SIGNATURE = Signature(("S", "T"), relations={"E": ("S", "T")},
                                 constants={"c": "S", "d": "T"})


def graph2():
    return FiniteStructure(GRAPH_SIGNATURE, {"S": ("a0", "a1")},
                           relations={"R": {("a0", "a1"), ("a1", "a1")}, "P": {("a1",)}},
                           constants={"c": "a0"}, name="G2")


def graph3():
    return FiniteStructure(GRAPH_SIGNATURE, {"S": ("b0", "b1", "b2")},
                           relations={"R": {("b0", "b1"), ("b1", "b2"), ("b2", "b0")},
                                      "P": {("b0",), ("b2",)}},
                           constants={"c": "b0"}, name="G3")


def func2():
    return FiniteStructure(FUNC_SIGNATURE, {"S": ("q0", "q1")},
                           relations={"P": {("q0",)}},
                           functions={"f": {("q0",): "q1", ("q1",): "q1"}},
                           constants={"c": "q0"}, name="F2")


def func3():
    return FiniteStructure(FUNC_SIGNATURE, {"S": ("r0", "r1", "r2")},
                           relations={"P": {("r2",)}},
                           functions={"f": {("r0",): "r1", ("r1",): "r0", ("r2",): "r2"}},
                           constants={"c": "r0"}, name="F3")


def two_sorted_a():
    return FiniteStructure(TWO_SORTED_SIGNATURE, {"S": ("s0", "s1"), "T": ("t0",)},
                           relations={"E": {("s1", "t0")}},
                           constants={"c": "s0", "d": "t0"}, name="T1")


def two_sorted_b():
    return FiniteStructure(TWO_SORTED_SIGNATURE, {"S": ("s0",), "T": ("t0", "t1")},
                           relations={"E": {("s0", "t1")}},
                           constants={"c": "s0", "d": "t0"}, name="T2")


@dataclass(frozen=True)
class SweepFamily:
    name: str
    signature: Signature
    pool: Tuple[FiniteStructure, ...]


def families() -> List[SweepFamily]:
    """One family per signature; every factor has at most 3 elements."""
    return [
        SweepFamily("set", SET_SIGNATURE, tuple(set_structure(n) for n in range(3))),
        SweepFamily("graph", GRAPH_SIGNATURE, (graph2(), graph3())),
        SweepFamily("func", FUNC_SIGNATURE, (func2(), func3())),
        SweepFamily("two-sorted", TWO_SORTED_SIGNATURE, (two_sorted_a(), two_sorted_b())),
    ]


def factor_size(m: FiniteStructure) -> int:
    return sum(len(u) for u in m.universes.values())


def sweep_products(family: SweepFamily, max_factors=3, max_size=3) -> List[ProductModel]:
    """All products (as multisets of factors) of 1..max_factors factors.

    Products at odd positions in the list get J generated by atom 0, so
    that the ideal is exercised without doubling the sweep.
    """
    pool = [m for m in family.pool if factor_size(m) <= max_size]
    out = []
    for k in range(1, max_factors + 1):
        for combo in itertools.combinations_with_replacement(range(len(pool)), k):
            j = (0,) if len(out) % 2 else ()
            out.append(product([pool[i] for i in combo], j))
    return out


def random_structure(sig: Signature, rng: random.Random, size: int, name="") -> FiniteStructure:
    """A random structure with ``size`` elements spread over the sorts."""
    k = len(sig.sorts)
    if size < k:
        raise ValueError(f"need at least one element per sort ({k})")
    counts = [1] * k
    for _ in range(size - k):
        counts[rng.randrange(k)] += 1
    unis = {s: tuple(f"{s.lower()}{i}" for i in range(c)) for s, c in zip(sig.sorts, counts)}
    rels = {}
    for r, arg_sorts in sig.relations.items():
        tuples = itertools.product(*(unis[s] for s in arg_sorts))
        rels[r] = {t for t in tuples if rng.random() < 0.5}
    funs = {}
    for f, (arg_sorts, res) in sig.functions.items():
        funs[f] = {args: rng.choice(unis[res])
                   for args in itertools.product(*(unis[s] for s in arg_sorts))}
    consts = {c: rng.choice(unis[s]) for c, s in sig.constants.items()}
    return FiniteStructure(sig, unis, relations=rels, functions=funs, constants=consts, name=name)


def random_family(sig: Signature, rng: random.Random, count=3, max_size=3) -> SweepFamily:
    """A pool of random factors of sizes up to ``max_size`` for an arbitrary signature."""
    k = len(sig.sorts)
    if max_size < k:
        raise ValueError(f"max size {max_size} is below the number of sorts {k}")
    pool = []
    for i in range(count):
        size = k + i % (max_size - k + 1)
        pool.append(random_structure(sig, rng, size, name=f"R{i}"))
    return SweepFamily("random", sig, tuple(pool))
