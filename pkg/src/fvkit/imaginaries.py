"""Canonical codes for definable sets in finite products.

A definable set Z lives in D(M) = M^{s_1} x ... x M^{s_k} for a product M.
Its point d has an i-th coordinate d(i) in D(M_i), the tuple of the i-th
components.  We compute

* the rectangle code of Z for a bipartition of the index set,
* the fiber equivalences E_i^Z, their meet E^Z and the code built from them,
* the automorphism group of the product, used to certify that codes are
  canonical: code(g.Z) = g.code(Z).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .evaluate import Evaluator
from .logic import Formula, Var
from .structures import FiniteStructure, ProductModel


class CapExceeded(RuntimeError):
    """A configured size limit was exceeded."""


# ---------------------------------------------------------------- definable sets

def factor_points(m: FiniteStructure, sorts: Sequence[str]):
    """D(M_i): tuples with one element per sort."""
    return list(itertools.product(*(m.universes[s] for s in sorts)))


def split_point(d, n) -> tuple:
    """Sort-major point (one product element per sort) to index-major."""
    return tuple(tuple(a[i] for a in d) for i in range(n))


def join_point(coords) -> tuple:
    """Index-major coordinates back to a sort-major point."""
    k = len(coords[0]) if coords else 0
    return tuple(tuple(c[s] for c in coords) for s in range(k))


@dataclass(frozen=True, eq=False)
class DefinableSet:
    ambient: ProductModel
    sorts: Tuple[str, ...]
    extension: FrozenSet[tuple]          # index-major points
    formula: Optional[Formula] = None

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "extension", frozenset(self.extension))
        for s in self.sorts:
            if s not in self.ambient.signature.sorts:
                raise ValueError(f"unknown sort {s}")

    @classmethod
    def from_points(cls, ambient, sorts, points, formula=None):
        n = ambient.n
        return cls(ambient, tuple(sorts), frozenset(split_point(d, n) for d in points), formula)

    @classmethod
    def from_formula(cls, ambient: ProductModel, formula: Formula, variables: Sequence[Var],
                     params=None):
        ev = Evaluator(ambient)
        sorts = tuple(v.sort for v in variables)
        pts = []
        for combo in itertools.product(*(ambient.universe(s) for s in sorts)):
            asg = dict(params or {})
            asg.update({v.name: a for v, a in zip(variables, combo)})
            if ev.truth(formula, asg):
                pts.append(combo)
        return cls.from_points(ambient, sorts, pts, formula)

    def domain(self):
        """Every index-major point of D(M)."""
        per = [factor_points(m, self.sorts) for m in self.ambient.factors]
        return [tuple(c) for c in itertools.product(*per)]

    def points(self):
        """The extension as sort-major tuples of product elements."""
        return {join_point(c) for c in self.extension}

    def with_extension(self, ext):
        return DefinableSet(self.ambient, self.sorts, frozenset(ext))


# ---------------------------------------------------------------- rectangles

def _block_key(block):
    return sorted(block)


def _canon_blocks(blocks):
    return tuple(sorted(set(blocks), key=_block_key))


@dataclass(frozen=True)
class RectangleCode:
    side: Tuple[int, ...]                # indices forming the first factor
    rows: Tuple[FrozenSet[tuple], ...]   # blocks of D(M_1)
    cols: Tuple[FrozenSet[tuple], ...]   # blocks of D(M_2): the fibers Z(a)
    pairs: Tuple[Tuple[int, int], ...]   # (row, col) with row x col inside Z

    def reconstruct(self, n) -> FrozenSet[tuple]:
        other = [i for i in range(n) if i not in self.side]
        out = set()
        for r, c in self.pairs:
            for a in self.rows[r]:
                for b in self.cols[c]:
                    coords = [None] * n
                    for i, x in zip(self.side, a):
                        coords[i] = x
                    for i, x in zip(other, b):
                        coords[i] = x
                    out.add(tuple(coords))
        return frozenset(out)


def rectangle_code(Z: DefinableSet, side=None) -> RectangleCode:
    """Decompose Z along M = M_side x M_rest into canonical rectangles.

    The column blocks are exactly the fibers Z(a) for a in D(M_side); the
    row blocks group the a's with equal fiber, and each row pairs with its
    fiber when that is nonempty.
    """
    n = Z.ambient.n
    side = tuple(sorted({0} if side is None else set(side)))
    if not side or any(not 0 <= i < n for i in side):
        raise ValueError("the first side must be a nonempty set of indices")
    other = [i for i in range(n) if i not in side]
    per = [factor_points(m, Z.sorts) for m in Z.ambient.factors]
    if any(not p for p in per):
        raise ValueError("empty universe")
    left = list(itertools.product(*(per[i] for i in side)))
    fiber: Dict[tuple, set] = {a: set() for a in left}
    for d in Z.extension:
        fiber[tuple(d[i] for i in side)].add(tuple(d[i] for i in other))
    groups: Dict[FrozenSet, set] = {}
    for a in left:
        groups.setdefault(frozenset(fiber[a]), set()).add(a)
    cols = _canon_blocks(groups)
    rows = _canon_blocks(frozenset(g) for g in groups.values())
    row_of = {frozenset(g): k for k, g in enumerate(rows)}
    col_of = {u: k for k, u in enumerate(cols)}
    pairs = tuple(sorted((row_of[frozenset(g)], col_of[u]) for u, g in groups.items() if u))
    return RectangleCode(side, rows, cols, pairs)


# ---------------------------------------------------------------- E^Z and codes

Partition = FrozenSet[FrozenSet[tuple]]


@dataclass(frozen=True)
class EZRelation:
    partitions: Tuple[Partition, ...]    # E_i^Z as a set of blocks of D(M_i)

    def block(self, i, e) -> FrozenSet[tuple]:
        for b in self.partitions[i]:
            if e in b:
                return b
        raise KeyError(e)

    def key(self, d) -> tuple:
        """The E^Z-class of an index-major point, as one block per index."""
        return tuple(self.block(i, e) for i, e in enumerate(d))

    def related(self, d, d2) -> bool:
        return self.key(d) == self.key(d2)

    def class_counts(self):
        return [len(p) for p in self.partitions]


def ez(Z: DefinableSet) -> EZRelation:
    """Per-index fiber partitions: e ~ e' at i iff Z has the same points
    over e and e' once the i-th coordinate is fixed."""
    parts = []
    for i, m in enumerate(Z.ambient.factors):
        fibers: Dict[tuple, set] = {e: set() for e in factor_points(m, Z.sorts)}
        for d in Z.extension:
            fibers[d[i]].add(d[:i] + d[i + 1:])
        groups: Dict[FrozenSet, set] = {}
        for e, fib in fibers.items():
            groups.setdefault(frozenset(fib), set()).add(e)
        parts.append(frozenset(frozenset(g) for g in groups.values()))
    return EZRelation(tuple(parts))


def is_union_of_classes(Z: DefinableSet, rel: Optional[EZRelation] = None) -> bool:
    rel = rel or ez(Z)
    keys = {rel.key(d) for d in Z.extension}
    return all((d in Z.extension) == (rel.key(d) in keys) for d in Z.domain())


@dataclass(frozen=True)
class WeakCode:
    gamma: Tuple[Partition, ...]
    image: FrozenSet[tuple]              # E^Z-classes inside Z, one block per index

    def reconstruct(self, domain) -> FrozenSet[tuple]:
        rel = EZRelation(self.gamma)
        return frozenset(d for d in domain if rel.key(d) in self.image)


def weak_ei_code(Z: DefinableSet) -> WeakCode:
    rel = ez(Z)
    return WeakCode(rel.partitions, frozenset(rel.key(d) for d in Z.extension))


def _render_elem(e):
    return e[0] if len(e) == 1 else "(" + " ".join(e) + ")"


def _render_block(b):
    return "(block " + " ".join(_render_elem(e) for e in sorted(b)) + ")"


def render_code(code: WeakCode) -> str:
    gamma, index = [], []
    for i, p in enumerate(code.gamma):
        blocks = _canon_blocks(p)
        index.append({b: k for k, b in enumerate(blocks)})
        gamma.append(f"({i} " + " ".join(_render_block(b) for b in blocks) + ")")
    pts = sorted(tuple(index[i][b] for i, b in enumerate(key)) for key in code.image)
    quotient = " ".join("(point " + " ".join(map(str, p)) + ")" for p in pts)
    return (f"(code (gamma {' '.join(gamma)}) (quotient{' ' + quotient if quotient else ''}))")


# ---------------------------------------------------------------- automorphisms

def _bijections(m1: FiniteStructure, m2: FiniteStructure):
    sorts = m1.signature.sorts
    if any(len(m1.universes[s]) != len(m2.universes[s]) for s in sorts):
        return
    per = [[dict(zip(m1.universes[s], perm)) for perm in itertools.permutations(m2.universes[s])]
           for s in sorts]
    for combo in itertools.product(*per):
        yield dict(zip(sorts, combo))


def _is_iso(m1, m2, sigma) -> bool:
    sig = m1.signature
    for c, s in sig.constants.items():
        if sigma[s][m1.constants[c]] != m2.constants[c]:
            return False
    for r, arg_sorts in sig.relations.items():
        image = {tuple(sigma[s][a] for s, a in zip(arg_sorts, t)) for t in m1.relations[r]}
        if image != m2.relations[r]:
            return False
    for f, (arg_sorts, res) in sig.functions.items():
        for args, v in m1.functions[f].items():
            mapped = tuple(sigma[s][a] for s, a in zip(arg_sorts, args))
            if m2.functions[f][mapped] != sigma[res][v]:
                return False
    return True


def isomorphisms(m1: FiniteStructure, m2: FiniteStructure) -> List[Dict[str, Dict[str, str]]]:
    return [s for s in _bijections(m1, m2) if _is_iso(m1, m2, s)]


@dataclass(frozen=True)
class Automorphism:
    """Index permutation ``perm`` with factor isomorphisms M_i -> M_perm(i)."""

    perm: Tuple[int, ...]
    maps: Tuple[Tuple[Tuple[str, Tuple[Tuple[str, str], ...]], ...], ...]

    @classmethod
    def build(cls, perm, sigmas):
        maps = tuple(tuple(sorted((s, tuple(sorted(m.items()))) for s, m in sig.items()))
                     for sig in sigmas)
        return cls(tuple(perm), maps)

    def sigma(self, i) -> Dict[str, Dict[str, str]]:
        return {s: dict(items) for s, items in self.maps[i]}

    def act_coords(self, d, sorts) -> tuple:
        """(g.d)(perm(i)) = sigma_i(d(i)) on an index-major point."""
        out = [None] * len(self.perm)
        for i, e in enumerate(d):
            sig = self.sigma(i)
            out[self.perm[i]] = tuple(sig[s][x] for s, x in zip(sorts, e))
        return tuple(out)

    def act_element(self, sort, a) -> tuple:
        out = [None] * len(self.perm)
        for i, x in enumerate(a):
            out[self.perm[i]] = self.sigma(i)[sort][x]
        return tuple(out)

    def act_mask(self, b: int) -> int:
        return sum(1 << self.perm[i] for i in range(len(self.perm)) if b >> i & 1)

    def act_set(self, Z: DefinableSet) -> DefinableSet:
        return Z.with_extension(self.act_coords(d, Z.sorts) for d in Z.extension)

    def act_code(self, code: WeakCode, sorts) -> WeakCode:
        n = len(self.perm)

        def move(i, block):
            sig = self.sigma(i)
            return frozenset(tuple(sig[s][x] for s, x in zip(sorts, e)) for e in block)
        gamma = [None] * n
        for i, p in enumerate(code.gamma):
            gamma[self.perm[i]] = frozenset(move(i, b) for b in p)
        image = set()
        for key in code.image:
            out = [None] * n
            for i, b in enumerate(key):
                out[self.perm[i]] = move(i, b)
            image.add(tuple(out))
        return WeakCode(tuple(gamma), frozenset(image))

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other."""
        n = len(self.perm)
        perm = [self.perm[other.perm[i]] for i in range(n)]
        sigmas = []
        for i in range(n):
            first, second = other.sigma(i), self.sigma(other.perm[i])
            sigmas.append({s: {a: second[s][b] for a, b in first[s].items()} for s in first})
        return Automorphism.build(perm, sigmas)


@dataclass
class AutGroup:
    elements: List[Automorphism]
    generators: List[Automorphism]

    @property
    def order(self):
        return len(self.elements)


SIZE_CAP = 10 ** 4
ORDER_CAP = 10 ** 5


def automorphisms(p: ProductModel, size_cap=SIZE_CAP, order_cap=ORDER_CAP) -> AutGroup:
    """All automorphisms of a finite product, preserving B = P(I) and J."""
    size = 1
    for m in p.factors:
        size *= sum(len(u) for u in m.universes.values())
    if size > size_cap:
        raise CapExceeded(f"universe size {size} exceeds the cap {size_cap}")
    n = p.n
    iso = {(i, j): isomorphisms(p.factors[i], p.factors[j]) for i in range(n) for j in range(n)}
    elements = []
    for perm in itertools.permutations(range(n)):
        if any(not iso[i, perm[i]] for i in range(n)):
            continue
        if {perm[i] for i in p.j_atoms} != set(p.j_atoms):
            continue
        count = 1
        for i in range(n):
            count *= len(iso[i, perm[i]])
        if len(elements) + count > order_cap:
            raise CapExceeded(f"automorphism group larger than {order_cap}")
        for sigmas in itertools.product(*(iso[i, perm[i]] for i in range(n))):
            elements.append(Automorphism.build(perm, sigmas))
    return AutGroup(elements, _generators(elements))


def _generators(elements):
    if not elements:
        return []
    identity = elements[0]
    span = {identity}
    gens = []
    for g in elements:
        if g in span:
            continue
        gens.append(g)
        frontier = list(span)
        while frontier:
            nxt = []
            for h in frontier:
                for s in gens:
                    k = s.compose(h)
                    if k not in span:
                        span.add(k)
                        nxt.append(k)
            frontier = nxt
    return gens


def preserves_structure(p: ProductModel, g: Automorphism) -> bool:
    """Direct check that g is an automorphism of the product."""
    sig = p.signature
    for c in sig.constants:
        const = tuple(m.constants[c] for m in p.factors)
        if g.act_element(sig.constants[c], const) != const:
            return False
    for r, arg_sorts in sig.relations.items():
        for args in itertools.product(*(p.universe(s) for s in arg_sorts)):
            holds = all(tuple(a[i] for a in args) in p.factors[i].relations[r] for i in range(p.n))
            moved = tuple(g.act_element(s, a) for s, a in zip(arg_sorts, args))
            holds2 = all(tuple(a[i] for a in moved) in p.factors[i].relations[r]
                         for i in range(p.n))
            if holds != holds2:
                return False
    for f, (arg_sorts, res) in sig.functions.items():
        for args in itertools.product(*(p.universe(s) for s in arg_sorts)):
            val = tuple(p.factors[i].functions[f][tuple(a[i] for a in args)] for i in range(p.n))
            moved = tuple(g.act_element(s, a) for s, a in zip(arg_sorts, args))
            val2 = tuple(p.factors[i].functions[f][tuple(a[i] for a in moved)]
                         for i in range(p.n))
            if g.act_element(res, val) != val2:
                return False
    return g.act_mask(p.jmask) == p.jmask
