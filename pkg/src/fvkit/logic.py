"""Signatures, terms and formulas for a base language L and its Boolean
extension (sorts ``B`` and ``Bbar``).

All nodes are frozen dataclasses, so they hash and compare structurally.
Sort checking happens in the constructors for everything that does not need
a signature; symbol arities are checked by :func:`check` and by the parser.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Tuple

B = "B"
BBAR = "Bbar"
BOOLEAN_SORTS = (B, BBAR)


class SortError(TypeError):
    """A term or formula is not sort-correct."""


class SignatureError(ValueError):
    """A signature is malformed."""


@dataclass(frozen=True)
class Signature:
    sorts: Tuple[str, ...]
    relations: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)
    functions: Mapping[str, Tuple[Tuple[str, ...], str]] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sorts", tuple(self.sorts))
        object.__setattr__(self, "relations", {k: tuple(v) for k, v in self.relations.items()})
        object.__setattr__(
            self, "functions", {k: (tuple(a), r) for k, (a, r) in self.functions.items()}
        )
        object.__setattr__(self, "constants", dict(self.constants))
        if len(set(self.sorts)) != len(self.sorts):
            raise SignatureError("duplicate sort name")
        for s in self.sorts:
            if s in BOOLEAN_SORTS:
                raise SignatureError(f"sort name {s!r} is reserved")
        names = list(self.relations) + list(self.functions) + list(self.constants)
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise SignatureError(f"symbol declared twice: {sorted(dup)[0]}")
        declared = set(self.sorts)
        for name, args in self.relations.items():
            for s in args:
                if s not in declared:
                    raise SignatureError(f"relation {name}: undeclared sort {s!r}")
        for name, (args, res) in self.functions.items():
            for s in args + (res,):
                if s not in declared:
                    raise SignatureError(f"function {name}: undeclared sort {s!r}")
        for name, s in self.constants.items():
            if s not in declared:
                raise SignatureError(f"constant {name}: undeclared sort {s!r}")

    def __hash__(self):
        return hash((self.sorts, tuple(sorted(self.relations.items())),
                     tuple(sorted(self.functions.items())),
                     tuple(sorted(self.constants.items()))))

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return (self.sorts == other.sorts and self.relations == other.relations
                and self.functions == other.functions and self.constants == other.constants)

    def symbols(self):
        return set(self.relations) | set(self.functions) | set(self.constants)


# ---------------------------------------------------------------- terms

class Term:
    __slots__ = ()

    @property
    def sort(self) -> str:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class Var(Term):
    name: str
    var_sort: str

    @property
    def sort(self):
        return self.var_sort


@dataclass(frozen=True)
class Const(Term):
    name: str
    const_sort: str

    @property
    def sort(self):
        return self.const_sort


@dataclass(frozen=True)
class App(Term):
    fn: str
    args: Tuple[Term, ...]
    result_sort: str

    @property
    def sort(self):
        return self.result_sort


@dataclass(frozen=True)
class BConst(Term):
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise SortError("Boolean constant must be 0 or 1")

    @property
    def sort(self):
        return B


def _boolean_pair(left, right, op):
    if left.sort not in BOOLEAN_SORTS or left.sort != right.sort:
        raise SortError(f"{op} needs two terms of the same Boolean sort, got "
                        f"{left.sort} and {right.sort}")


@dataclass(frozen=True)
class Meet(Term):
    left: Term
    right: Term

    def __post_init__(self):
        _boolean_pair(self.left, self.right, "meet")

    @property
    def sort(self):
        return self.left.sort


@dataclass(frozen=True)
class Join(Term):
    left: Term
    right: Term

    def __post_init__(self):
        _boolean_pair(self.left, self.right, "join")

    @property
    def sort(self):
        return self.left.sort


@dataclass(frozen=True)
class Compl(Term):
    arg: Term

    def __post_init__(self):
        if self.arg.sort not in BOOLEAN_SORTS:
            raise SortError(f"compl needs a Boolean-sort term, got {self.arg.sort}")

    @property
    def sort(self):
        return self.arg.sort


@dataclass(frozen=True)
class BVal(Term):
    """Boolean value ``[phi]`` of a base-language formula at the ambient
    assignment of its free variables."""

    formula: "Formula"

    def __post_init__(self):
        if not is_base_formula(self.formula):
            raise SortError("[ ] applies only to base-language formulas")

    @property
    def sort(self):
        return B


@dataclass(frozen=True)
class Bar(Term):
    arg: Term

    def __post_init__(self):
        if self.arg.sort != B:
            raise SortError(f"bar needs a term of sort B, got {self.arg.sort}")

    @property
    def sort(self):
        return BBAR


# ---------------------------------------------------------------- formulas

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: Tuple[Term, ...]

    def __post_init__(self):
        for a in self.args:
            if a.sort in BOOLEAN_SORTS:
                raise SortError(f"relation {self.name} applied to a {a.sort}-sort term")


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term

    def __post_init__(self):
        if self.left.sort != self.right.sort:
            raise SortError(f"= between sorts {self.left.sort} and {self.right.sort}")


@dataclass(frozen=True)
class Le(Formula):
    left: Term
    right: Term

    def __post_init__(self):
        _boolean_pair(self.left, self.right, "<=")


@dataclass(frozen=True)
class At(Formula):
    """``AT n t``: t is the join of exactly n atoms (``AT 0 t`` means t = 0)."""

    n: int
    term: Term

    def __post_init__(self):
        if self.n < 0:
            raise SortError("AT index must be non-negative")
        if self.term.sort not in BOOLEAN_SORTS:
            raise SortError(f"AT applied to a {self.term.sort}-sort term")


@dataclass(frozen=True)
class InJ(Formula):
    term: Term

    def __post_init__(self):
        if self.term.sort != B:
            raise SortError(f"J applied to a {self.term.sort}-sort term")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: Var
    body: Formula


QUANTIFIERS = (Exists, Forall)
BINARY = (And, Or, Implies)


# ---------------------------------------------------------------- helpers

def _balanced(items, op):
    """Fold ``items`` with a binary ``op`` into a balanced tree, keeping the
    depth logarithmic for long joins and conjunctions."""
    if len(items) == 1:
        return items[0]
    if len(items) == 2:
        return op(items[0], items[1])
    mid = len(items) // 2 if len(items) > 3 else 1
    return op(_balanced(items[:mid], op), _balanced(items[mid:], op))


def conj(*fs):
    """Conjunction; the empty conjunction is ``Top``."""
    fs = [f for f in fs if not isinstance(f, Top)]
    return _balanced(fs, And) if fs else Top()


def disj(*fs):
    fs = [f for f in fs if not isinstance(f, Bottom)]
    return _balanced(fs, Or) if fs else Bottom()


def meet_all(ts, sort=B):
    ts = list(ts)
    if not ts:
        return BConst(1) if sort == B else Bar(BConst(1))
    return _balanced(ts, Meet)


def join_all(ts, sort=B):
    ts = list(ts)
    if not ts:
        return BConst(0) if sort == B else Bar(BConst(0))
    return _balanced(ts, Join)


def neg(f):
    """Negation that collapses double negations and constants."""
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, Top):
        return Bottom()
    if isinstance(f, Bottom):
        return Top()
    return Not(f)


def children(x):
    """Immediate sub-terms / sub-formulas of a node (quantified variable excluded)."""
    if isinstance(x, (Var, Const, BConst, Top, Bottom)):
        return ()
    if isinstance(x, App) or isinstance(x, Rel):
        return x.args
    if isinstance(x, (Meet, Join, Eq, Le, And, Or, Implies)):
        return (x.left, x.right)
    if isinstance(x, (Compl, Bar)):
        return (x.arg,)
    if isinstance(x, Not):
        return (x.arg,)
    if isinstance(x, BVal):
        return (x.formula,)
    if isinstance(x, (At, InJ)):
        return (x.term,)
    if isinstance(x, QUANTIFIERS):
        return (x.body,)
    raise TypeError(f"not a term or formula: {x!r}")


def free_vars(x) -> Dict[str, Var]:
    """Free variables by name, in order of first occurrence."""
    out: Dict[str, Var] = {}
    _free(x, frozenset(), out)
    return out


def _free(x, bound, out):
    if isinstance(x, Var):
        if x.name not in bound and x.name not in out:
            out[x.name] = x
        return
    if isinstance(x, QUANTIFIERS):
        _free(x.body, bound | {x.var.name}, out)
        return
    for c in children(x):
        _free(c, bound, out)


def all_var_names(x):
    """Every variable name occurring in x, free or bound."""
    names = set()
    stack = [x]
    while stack:
        y = stack.pop()
        if isinstance(y, Var):
            names.add(y.name)
        elif isinstance(y, QUANTIFIERS):
            names.add(y.var.name)
        stack.extend(children(y))
    return names


def is_base_formula(f):
    """True when no Boolean-sort term or Boolean-only atom occurs in f."""
    stack = [f]
    while stack:
        y = stack.pop()
        if isinstance(y, (Le, At, InJ, BConst, Meet, Join, Compl, BVal, Bar)):
            return False
        if isinstance(y, Term) and y.sort in BOOLEAN_SORTS:
            return False
        if isinstance(y, QUANTIFIERS) and y.var.sort in BOOLEAN_SORTS:
            return False
        stack.extend(children(y))
    return True


def is_boolean_formula(f):
    """True when f mentions only the Boolean sorts (no base terms outside [ ])."""
    stack = [f]
    while stack:
        y = stack.pop()
        if isinstance(y, BVal):
            continue
        if isinstance(y, (Rel, App, Const)):
            return False
        if isinstance(y, Var) and y.sort not in BOOLEAN_SORTS:
            return False
        if isinstance(y, QUANTIFIERS) and y.var.sort not in BOOLEAN_SORTS:
            return False
        if isinstance(y, Eq) and y.left.sort not in BOOLEAN_SORTS:
            return False
        stack.extend(children(y))
    return True


def is_quantifier_free(f):
    stack = [f]
    while stack:
        y = stack.pop()
        if isinstance(y, QUANTIFIERS):
            return False
        stack.extend(children(y))
    return True


def depth(f):
    """Nesting depth of connectives and quantifiers.

    An atom has depth 1 plus the largest depth of a formula inside one of its
    [ ] terms, so nesting through Boolean values counts as well.
    """
    if isinstance(f, (Not,)):
        return 1 + depth(f.arg)
    if isinstance(f, BINARY):
        return 1 + max(depth(f.left), depth(f.right))
    if isinstance(f, QUANTIFIERS):
        return 1 + depth(f.body)
    return 1 + max((depth(g) for g in _inner_formulas(f)), default=0)


def _inner_formulas(x):
    stack = list(children(x))
    while stack:
        y = stack.pop()
        if isinstance(y, BVal):
            yield y.formula
        else:
            stack.extend(children(y))


class FreshNames:
    """Generates variable names avoiding a given set."""

    def __init__(self, avoid: Iterable[str] = ()):
        self.avoid = set(avoid)

    def __call__(self, stem):
        for k in itertools.count(1):
            name = f"{stem}{k}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name


# ---------------------------------------------------------------- substitution

def substitute(x, binding: Mapping[str, Term]):
    """Capture-avoiding substitution of terms for free variables (by name)."""
    for name, t in binding.items():
        if not isinstance(t, Term):
            raise SortError(f"binding for {name} is not a term")
    if not binding:
        return x
    fv = free_vars(x)
    binding = {n: t for n, t in binding.items() if n in fv}
    for n, t in binding.items():
        if fv[n].sort != t.sort:
            raise SortError(f"cannot substitute a {t.sort}-sort term for {n}:{fv[n].sort}")
    if not binding:
        return x
    range_names = set()
    for t in binding.values():
        range_names |= set(free_vars(t))
    fresh = FreshNames(all_var_names(x) | range_names | set(binding))
    return _subst(x, binding, range_names, fresh)


def _subst(x, binding, range_names, fresh):
    if not binding:
        return x
    if isinstance(x, Var):
        return binding.get(x.name, x)
    if isinstance(x, (Const, BConst, Top, Bottom)):
        return x
    if isinstance(x, QUANTIFIERS):
        v = x.var
        inner = {n: t for n, t in binding.items() if n != v.name}
        if not inner:
            return x
        body = x.body
        if v.name in range_names and any(n in free_vars(body) for n in inner):
            nv = Var(fresh(v.name.rstrip("0123456789") or "v"), v.sort)
            body = _subst(body, {v.name: nv}, {nv.name}, fresh)
            v = nv
        return type(x)(v, _subst(body, inner, range_names, fresh))
    if isinstance(x, App):
        return App(x.fn, tuple(_subst(a, binding, range_names, fresh) for a in x.args), x.result_sort)
    if isinstance(x, Rel):
        return Rel(x.name, tuple(_subst(a, binding, range_names, fresh) for a in x.args))
    if isinstance(x, At):
        return At(x.n, _subst(x.term, binding, range_names, fresh))
    if isinstance(x, (InJ, Compl, Bar, Not)):
        arg = x.term if isinstance(x, InJ) else x.arg
        return type(x)(_subst(arg, binding, range_names, fresh))
    if isinstance(x, BVal):
        return BVal(_subst(x.formula, binding, range_names, fresh))
    # two-child nodes
    return type(x)(_subst(x.left, binding, range_names, fresh),
                   _subst(x.right, binding, range_names, fresh))


def map_children(x, fn):
    """Rebuild node x with ``fn`` applied to each immediate child."""
    if isinstance(x, (Var, Const, BConst, Top, Bottom)):
        return x
    if isinstance(x, App):
        return App(x.fn, tuple(fn(a) for a in x.args), x.result_sort)
    if isinstance(x, Rel):
        return Rel(x.name, tuple(fn(a) for a in x.args))
    if isinstance(x, At):
        return At(x.n, fn(x.term))
    if isinstance(x, InJ):
        return InJ(fn(x.term))
    if isinstance(x, (Compl, Bar, Not)):
        return type(x)(fn(x.arg))
    if isinstance(x, BVal):
        return BVal(fn(x.formula))
    if isinstance(x, QUANTIFIERS):
        return type(x)(x.var, fn(x.body))
    return type(x)(fn(x.left), fn(x.right))


# ---------------------------------------------------------------- alpha-equivalence

def canonical(x):
    """Rename bound variables by binder depth, for alpha-equivalence tests."""
    return _canon(x, {}, 0)


def _canon(x, env, d):
    if isinstance(x, Var):
        return env.get(x.name, x)
    if isinstance(x, QUANTIFIERS):
        nv = Var(f"%{d}", x.var.sort)
        inner = dict(env)
        inner[x.var.name] = nv
        return type(x)(nv, _canon(x.body, inner, d + 1))
    return map_children(x, lambda c: _canon(c, env, d))


def alpha_equivalent(f, g):
    return canonical(f) == canonical(g)


# ---------------------------------------------------------------- signature check

def check(x, sig: Signature):
    """Verify that every symbol in x is declared in sig with matching sorts."""
    stack = [x]
    while stack:
        y = stack.pop()
        if isinstance(y, Var) and y.sort not in BOOLEAN_SORTS and y.sort not in sig.sorts:
            raise SortError(f"variable {y.name} has undeclared sort {y.sort}")
        if isinstance(y, QUANTIFIERS):
            stack.append(y.var)
        if isinstance(y, Const):
            if sig.constants.get(y.name) != y.sort:
                raise SortError(f"unknown constant {y.name}:{y.sort}")
        elif isinstance(y, App):
            decl = sig.functions.get(y.fn)
            if decl is None:
                raise SortError(f"unknown function {y.fn}")
            args, res = decl
            if tuple(a.sort for a in y.args) != args or res != y.sort:
                raise SortError(f"function {y.fn} applied with wrong sorts")
        elif isinstance(y, Rel):
            decl = sig.relations.get(y.name)
            if decl is None:
                raise SortError(f"unknown relation {y.name}")
            if tuple(a.sort for a in y.args) != decl:
                raise SortError(f"relation {y.name} applied with wrong sorts")
        stack.extend(children(y))
    return x


def desugar(f):
    """Rewrite ``implies`` and ``forall`` into not/or/exists (outside [ ])."""
    if isinstance(f, Implies):
        return Or(neg(desugar(f.left)), desugar(f.right))
    if isinstance(f, Forall):
        return Not(Exists(f.var, neg(desugar(f.body))))
    if isinstance(f, Formula):
        return map_children(f, lambda c: desugar(c) if isinstance(c, Formula) else c)
    return f



def _cache_hash(cls):
    compute = cls.__hash__

    def __hash__(self):
        d = self.__dict__
        h = d.get("_hash")
        if h is None:
            h = d["_hash"] = compute(self)
        return h
    cls.__hash__ = __hash__


for _cls in (Var, Const, App, BConst, Meet, Join, Compl, BVal, Bar, Top, Bottom, Rel, Eq, Le,
             At, InJ, Not, And, Or, Implies, Exists, Forall):
    _cache_hash(_cls)
del _cls
