"""Finite structures, finite products with Boolean algebra P(I) and an
atom-generated ideal J, and reduced products M/J.

Subsets of the index set I = {0, ..., n-1} are ints used as bitsets.
Elements of a product are tuples with one coordinate per factor.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Mapping, Sequence, Tuple

from . import sexp
from .logic import Signature


class StructureError(ValueError):
    """A finite structure or product is malformed."""


def mask_of(indices) -> int:
    """Bitset for an iterable of indices (ints pass through unchanged)."""
    if isinstance(indices, int):
        return indices
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_of(mask: int):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    signature: Signature
    universes: Mapping[str, Tuple[str, ...]]
    relations: Mapping[str, FrozenSet[tuple]] = field(default_factory=dict)
    functions: Mapping[str, Mapping[tuple, str]] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)
    designated: Mapping[str, str] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        sig = self.signature
        unis = {s: tuple(self.universes.get(s, ())) for s in sig.sorts}
        object.__setattr__(self, "universes", unis)
        for s, u in unis.items():
            if not u:
                raise StructureError(f"sort {s} has an empty universe")
            if len(set(u)) != len(u):
                raise StructureError(f"sort {s} lists an element twice")
        elem = {s: set(u) for s, u in unis.items()}
        rels = {}
        for r, arg_sorts in sig.relations.items():
            ext = frozenset(tuple(t) for t in self.relations.get(r, ()))
            for t in ext:
                if len(t) != len(arg_sorts) or any(a not in elem[s] for a, s in zip(t, arg_sorts)):
                    raise StructureError(f"relation {r}: tuple {t} outside the universe")
            rels[r] = ext
        extra = set(self.relations) - set(sig.relations)
        if extra:
            raise StructureError(f"relation {sorted(extra)[0]} not in the signature")
        object.__setattr__(self, "relations", rels)
        funs = {}
        for f, (arg_sorts, res) in sig.functions.items():
            table = {tuple(k): v for k, v in self.functions.get(f, {}).items()}
            for args in itertools.product(*(unis[s] for s in arg_sorts)):
                if args not in table:
                    raise StructureError(f"function {f} undefined at {args}")
                if table[args] not in elem[res]:
                    raise StructureError(f"function {f}: value {table[args]} outside sort {res}")
            funs[f] = table
        object.__setattr__(self, "functions", funs)
        for c, s in sig.constants.items():
            if c not in self.constants:
                raise StructureError(f"constant {c} has no value")
            if self.constants[c] not in elem[s]:
                raise StructureError(f"constant {c}: value outside sort {s}")
        object.__setattr__(self, "constants", dict(self.constants))
        des = {}
        for s in sig.sorts:
            named = [self.constants[c] for c, cs in sig.constants.items() if cs == s]
            des[s] = self.designated.get(s, named[0] if named else unis[s][0])
            if des[s] not in elem[s]:
                raise StructureError(f"designated element of {s} outside the universe")
        object.__setattr__(self, "designated", des)

    def size(self, sort=None):
        if sort is None:
            sort = self.signature.sorts[0]
        return len(self.universes[sort])

    def __repr__(self):
        label = self.name or "structure"
        sizes = ",".join(str(len(u)) for u in self.universes.values())
        return f"<{label} [{sizes}]>"


# ---------------------------------------------------------------- built-in factors

SET_SIGNATURE = Signature(("S",), constants={"c": "S"})


def set_structure(n: int) -> FiniteStructure:
    """SET_n: an (n+1)-element pure set with one named point ``c``."""
    elems = tuple(f"p{k}" for k in range(n + 1))
    return FiniteStructure(SET_SIGNATURE, {"S": elems}, constants={"c": elems[0]},
                           name=f"SET_{n}")


def pure_set(n: int, sort="S") -> FiniteStructure:
    """An n-element set in the empty signature (one sort)."""
    elems = tuple(f"e{k}" for k in range(n))
    return FiniteStructure(Signature((sort,)), {sort: elems}, name=f"PURE_{n}")


# ---------------------------------------------------------------- file formats

def parse_structure(text: str, sig: Signature, name="") -> FiniteStructure:
    node = sexp.read(text)
    if not isinstance(node, list) or not node or node[0] != "structure":
        raise StructureError("expected (structure ...)")
    unis: Dict[str, tuple] = {}
    rels: Dict[str, set] = {}
    funs: Dict[str, dict] = {}
    consts: Dict[str, str] = {}
    des: Dict[str, str] = {}
    for item in node[1:]:
        if not isinstance(item, list) or not item:
            raise StructureError(f"bad structure entry {sexp.dumps(item)}")
        head = item[0]
        if head == "sort":
            if len(item) != 3 or not isinstance(item[2], list) or item[2][0] != "elems":
                raise StructureError("sort entry must be (sort S (elems e ...))")
            unis[str(item[1])] = tuple(str(e) for e in item[2][1:])
        elif head == "rel":
            rels.setdefault(str(item[1]), set())
            for t in item[2:]:
                if not isinstance(t, list) or not t or t[0] != "tuple":
                    raise StructureError("relation entries must be (tuple ...)")
                rels[str(item[1])].add(tuple(str(e) for e in t[1:]))
        elif head == "fun":
            table = funs.setdefault(str(item[1]), {})
            for entry in item[2:]:
                if (not isinstance(entry, list) or len(entry) != 3 or entry[1] != "->"
                        or not isinstance(entry[0], list)):
                    raise StructureError("function entries must be ((args) -> val)")
                table[tuple(str(e) for e in entry[0])] = str(entry[2])
        elif head == "const":
            consts[str(item[1])] = str(item[2])
        elif head == "designated":
            des[str(item[1])] = str(item[2])
        else:
            raise StructureError(f"unknown structure entry {head}")
    return FiniteStructure(sig, unis, rels, funs, consts, des, name=name)


def render_structure(m: FiniteStructure) -> str:
    lines = ["(structure"]
    for s, u in m.universes.items():
        lines.append(f"  (sort {s} (elems {' '.join(u)}))")
    for r, ext in m.relations.items():
        tuples = " ".join("(tuple " + " ".join(t) + ")" for t in sorted(ext))
        lines.append(f"  (rel {r}{' ' + tuples if tuples else ''})")
    for f, table in m.functions.items():
        entries = " ".join(f"(({' '.join(k)}) -> {v})" for k, v in sorted(table.items()))
        lines.append(f"  (fun {f} {entries})")
    for c, v in m.constants.items():
        lines.append(f"  (const {c} {v})")
    return "\n".join(lines) + ")"


def load_product(path: str, sig: Signature) -> "ProductModel":
    """Read ``(product (factors file ...) (ideal-atoms i ...))``; factor paths
    are resolved relative to the product file."""
    with open(path) as fh:
        node = sexp.read(fh.read())
    if not isinstance(node, list) or not node or node[0] != "product":
        raise StructureError("expected (product ...)")
    files, atoms = [], []
    for item in node[1:]:
        if item[0] == "factors":
            files = [str(x) for x in item[1:]]
        elif item[0] == "ideal-atoms":
            atoms = [int(x) for x in item[1:]]
        else:
            raise StructureError(f"unknown product entry {item[0]}")
    base = os.path.dirname(os.path.abspath(path))
    factors = []
    for f in files:
        full = f if os.path.isabs(f) else os.path.join(base, f)
        with open(full) as fh:
            factors.append(parse_structure(fh.read(), sig, name=os.path.basename(f)))
    return product(factors, atoms)


# ---------------------------------------------------------------- products

@dataclass(frozen=True, eq=False)
class ProductModel:
    """``prod_i M_i`` with B = P(I) and J generated by ``j_atoms``."""

    factors: Tuple[FiniteStructure, ...]
    j_atoms: FrozenSet[int] = frozenset()

    @property
    def signature(self) -> Signature:
        return self.factors[0].signature

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def jmask(self) -> int:
        return mask_of(self.j_atoms)

    @property
    def quotient_trivial(self) -> bool:
        """J = P(I): happens exactly when every atom generates J."""
        return self.jmask == self.full

    def universe(self, sort) -> Sequence[tuple]:
        return self._universes[sort]

    @cached_property
    def _universes(self):
        return {s: list(itertools.product(*(m.universes[s] for m in self.factors)))
                for s in self.signature.sorts}

    def in_ideal(self, b: int) -> bool:
        return b & ~self.jmask == 0

    def ideal(self):
        """Every element of J (all subsets of the generating atoms)."""
        j = self.jmask
        sub = j
        out = []
        while True:
            out.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & j
        return sorted(out)

    def designated(self, sort) -> tuple:
        return tuple(m.designated[sort] for m in self.factors)

    def __repr__(self):
        js = sorted(self.j_atoms)
        return f"<product {' x '.join(m.name or '?' for m in self.factors)} J={js}>"


def product(factors, j_atoms=()) -> ProductModel:
    factors = tuple(factors)
    if not factors:
        raise StructureError("a product needs at least one factor")
    sig = factors[0].signature
    for m in factors[1:]:
        if m.signature != sig:
            raise StructureError("factors do not share one signature")
    atoms = frozenset(indices_of(j_atoms) if isinstance(j_atoms, int) else j_atoms)
    for i in atoms:
        if not 0 <= i < len(factors):
            raise StructureError(f"ideal atom {i} is not an index")
    return ProductModel(factors, atoms)


def glue(parts, n=None):
    """Splice elements along a partition of unity.

    ``parts`` is a list of ``(b, a)`` with ``b`` a set of indices (or bitset)
    and ``a`` a product element.  The result agrees with ``a`` on ``b``.
    """
    parts = [(mask_of(b), tuple(a)) for b, a in parts]
    if not parts:
        raise StructureError("nothing to glue")
    if n is None:
        n = len(parts[0][1])
    seen = 0
    for b, a in parts:
        if len(a) != n:
            raise StructureError("elements of different lengths")
        if b & seen:
            raise StructureError("parts are not pairwise disjoint")
        seen |= b
    if seen != (1 << n) - 1:
        raise StructureError("parts do not cover the index set")
    out = [None] * n
    for b, a in parts:
        for i in indices_of(b):
            out[i] = a[i]
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """The reduced product ``M/J`` with Boolean algebra ``B/J``.

    Elements are represented by canonical class representatives: the
    coordinates at ideal atoms are reset to the factor's designated element.
    """

    base: ProductModel

    @property
    def signature(self):
        return self.base.signature

    @property
    def active(self) -> int:
        return self.base.full & ~self.base.jmask

    def canonical(self, sort, a) -> tuple:
        j = self.base.j_atoms
        return tuple(self.base.factors[i].designated[sort] if i in j else x
                     for i, x in enumerate(a))

    def same_class(self, a, b) -> bool:
        return all(x == y for i, (x, y) in enumerate(zip(a, b)) if i not in self.base.j_atoms)

    @cached_property
    def _classes(self):
        out = {}
        for s in self.signature.sorts:
            groups: Dict[tuple, list] = {}
            for a in self.base.universe(s):
                groups.setdefault(self.canonical(s, a), []).append(a)
            out[s] = groups
        return out

    def classes(self, sort):
        """Mapping from canonical representative to the members of its class."""
        return self._classes[sort]

    def universe(self, sort):
        return list(self._classes[sort])

    @property
    def is_one_point(self) -> bool:
        return all(len(g) == 1 for g in self._classes.values())

    def __repr__(self):
        return f"<{self.base!r} / J>"


def quotient(p: ProductModel) -> ReducedModel:
    return ReducedModel(p)


@dataclass(frozen=True)
class PowersetAlgebra:
    """The Boolean algebra P(n) on its own, with no base sorts and no ideal."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise StructureError("P(n) needs n >= 1")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __repr__(self):
        return f"<P({self.n})>"
