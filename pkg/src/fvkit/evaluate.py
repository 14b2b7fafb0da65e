"""Brute-force Tarskian evaluation on finite structures, finite products and
reduced products.

Formulas are compiled to closures over an environment dict.  Quantifiers
enumerate the finite universes in universe order (B-sort quantifiers run over
all subsets of I).  Two optimisations are applied unless ``naive=True``:
quantifier nodes are memoised on the values of their free variables, and in
a block of consecutive quantifiers each conjunct (disjunct under ``forall``)
is tested as soon as the variables it mentions are bound.  Neither changes
the semantics; the test suite checks both modes against each other.
"""

from __future__ import annotations

import itertools
from typing import Callable, Dict, Mapping, Optional

from .logic import (
    App, At, B, BBAR, BConst, BVal, Bar, Bottom, Compl, Const, Eq, Exists, Forall,
    Formula, Implies, InJ, Join, Le, Meet, Not, Or, And, Rel, Term, Top, Var,
    free_vars,
)
from .structures import FiniteStructure, PowersetAlgebra, ProductModel, ReducedModel, mask_of

_MISSING = object()


class EvalError(ValueError):
    """Unbound variable, ill-sorted value, or a construct the model lacks."""


def _flatten(f, cls):
    if isinstance(f, cls):
        return _flatten(f.left, cls) + _flatten(f.right, cls)
    return [f]


# ---------------------------------------------------------------- backends

class _StructureBackend:
    boolean = False

    def __init__(self, m: FiniteStructure):
        self.m = m

    def universe(self, sort):
        if sort in (B, BBAR):
            raise EvalError("Boolean sorts are only available in product models")
        return self.m.universes[sort]

    def rel(self, name):
        ext = self.m.relations[name]
        return lambda args: args in ext

    def fn(self, name):
        table = self.m.functions[name]
        return table.__getitem__

    def const(self, name):
        return self.m.constants[name]

    def check_value(self, sort, v):
        if v not in self.m.universes.get(sort, ()):
            raise EvalError(f"{v!r} is not an element of sort {sort}")
        return v


class _ProductBackend:
    boolean = True

    def __init__(self, model, naive):
        if isinstance(model, ReducedModel):
            self.p = model.base
            self.reduced = model
            self.active = model.active
            self.jeff = 0
        else:
            self.p = model
            self.reduced = None
            self.active = model.full
            self.jeff = model.jmask
        self.naive = naive
        self.idx = [i for i in range(self.p.n) if self.active >> i & 1]
        self.factor_eval = [Evaluator(m, naive=naive) for m in self.p.factors]
        self.top = {B: self.active, BBAR: self.active & ~self.jeff}
        self._bool_universe = {
            s: [m for m in range(self.p.full + 1) if m & ~t == 0] for s, t in self.top.items()
        }
        self._unis = {}

    def clear(self):
        for ev in self.factor_eval:
            ev.clear()

    def canon(self, sort, a):
        if self.reduced is None:
            return a
        return self.reduced.canonical(sort, a)

    def universe(self, sort):
        if sort in (B, BBAR):
            return self._bool_universe[sort]
        if sort not in self._unis:
            if self.reduced is None:
                self._unis[sort] = self.p.universe(sort)
            else:
                self._unis[sort] = self.reduced.universe(sort)
        return self._unis[sort]

    def rel(self, name):
        exts = [m.relations[name] for m in self.p.factors]
        idx = self.idx

        def holds(args):
            for i in idx:
                if tuple(a[i] for a in args) not in exts[i]:
                    return False
            return True
        return holds

    def fn(self, name):
        tables = [m.functions[name] for m in self.p.factors]
        n = self.p.n
        res_sort = self.p.signature.functions[name][1]
        if self.reduced is None:
            return lambda args: tuple(tables[i][tuple(a[i] for a in args)] for i in range(n))
        canon = self.reduced.canonical
        return lambda args: canon(res_sort, tuple(tables[i][tuple(a[i] for a in args)]
                                                  for i in range(n)))

    def const(self, name):
        sort = self.p.signature.constants[name]
        return self.canon(sort, tuple(m.constants[name] for m in self.p.factors))

    def bval(self, phi):
        fv = tuple(free_vars(phi))
        comps = [ev.compile(phi) for ev in self.factor_eval]
        idx = self.idx

        def value(env):
            vals = [env[v] for v in fv]
            m = 0
            for i in idx:
                if comps[i]({v: x[i] for v, x in zip(fv, vals)}):
                    m |= 1 << i
            return m
        if self.naive:
            return value
        memo = {}

        def cached(env):
            key = tuple(env[v] for v in fv)
            r = memo.get(key)
            if r is None:
                r = memo[key] = value(env)
            return r
        return cached

    def check_value(self, sort, v):
        if sort in (B, BBAR):
            m = mask_of(v)
            if m < 0 or m > self.p.full:
                raise EvalError(f"{v!r} is not a subset of the index set")
            m &= self.top[sort]
            return m
        v = tuple(v)
        if len(v) != self.p.n:
            raise EvalError(f"{v!r} has the wrong number of coordinates")
        for m, x in zip(self.p.factors, v):
            if x not in m.universes[sort]:
                raise EvalError(f"{x!r} is not an element of sort {sort}")
        return self.canon(sort, v)


class _PowersetBackend:
    boolean = True
    jeff = 0

    def __init__(self, algebra: PowersetAlgebra):
        self.top = {B: algebra.full}
        self._uni = list(range(algebra.full + 1))

    def clear(self):
        pass

    def universe(self, sort):
        if sort != B:
            raise EvalError(f"P(n) has no sort {sort}")
        return self._uni

    def _missing(self, name):
        raise EvalError(f"P(n) interprets no symbol {name}")

    rel = fn = const = _missing

    def bval(self, phi):
        raise EvalError("[ ] needs a product model")

    def check_value(self, sort, v):
        if sort != B:
            raise EvalError(f"P(n) has no sort {sort}")
        m = mask_of(v)
        if m < 0 or m > self.top[B]:
            raise EvalError(f"{v!r} is not a subset of the index set")
        return m


# ---------------------------------------------------------------- evaluator

class Evaluator:
    """Compiles and evaluates formulas and terms in one model."""

    def __init__(self, model, naive: bool = False):
        self.model = model
        self.naive = naive
        if isinstance(model, FiniteStructure):
            self.backend = _StructureBackend(model)
        elif isinstance(model, (ProductModel, ReducedModel)):
            self.backend = _ProductBackend(model, naive)
        elif isinstance(model, PowersetAlgebra):
            self.backend = _PowersetBackend(model)
        else:
            raise EvalError(f"cannot evaluate in {model!r}")
        self._cache: Dict[object, Callable] = {}

    def clear(self):
        """Drop compiled closures and memo tables."""
        self._cache.clear()
        if self.backend.boolean:
            self.backend.clear()

    # public -----------------------------------------------------------
    def truth(self, f: Formula, asg: Optional[Mapping] = None) -> bool:
        env = self._env(f, asg)
        return bool(self.compile(f)(env))

    def value(self, t: Term, asg: Optional[Mapping] = None):
        env = self._env(t, asg)
        return self.compile_term(t)(env)

    def assignments(self, variables):
        unis = [self.backend.universe(v.sort) for v in variables]
        for combo in itertools.product(*unis):
            yield {v.name: x for v, x in zip(variables, combo)}

    def _env(self, x, asg):
        asg = dict(asg or {})
        env = {}
        for name, v in free_vars(x).items():
            if name not in asg:
                raise EvalError(f"unbound free variable {name}")
            env[name] = self.backend.check_value(v.sort, asg[name])
        return env

    def compile(self, f: Formula):
        c = self._cache.get(f)
        if c is None:
            c = self._cache[f] = self._formula(f)
        return c

    def compile_term(self, t: Term):
        c = self._cache.get(t)
        if c is None:
            c = self._cache[t] = self._term(t)
        return c

    # terms ------------------------------------------------------------
    def _bool(self):
        if not self.backend.boolean:
            raise EvalError("Boolean sorts are only available in product models")
        return self.backend

    def _term(self, t):
        if isinstance(t, Var):
            name = t.name
            return lambda env: env[name]
        if isinstance(t, Const):
            v = self.backend.const(t.name)
            return lambda env: v
        if isinstance(t, App):
            f = self.backend.fn(t.fn)
            args = [self.compile_term(a) for a in t.args]
            if len(args) == 1:
                a0 = args[0]
                return lambda env: f((a0(env),))
            return lambda env: f(tuple(a(env) for a in args))
        if isinstance(t, BConst):
            v = self._bool().top[B] if t.value else 0
            return lambda env: v
        if isinstance(t, Meet):
            a, b = self.compile_term(t.left), self.compile_term(t.right)
            return lambda env: a(env) & b(env)
        if isinstance(t, Join):
            a, b = self.compile_term(t.left), self.compile_term(t.right)
            return lambda env: a(env) | b(env)
        if isinstance(t, Compl):
            top = self._bool().top[t.sort]
            a = self.compile_term(t.arg)
            return lambda env: top ^ a(env)
        if isinstance(t, Bar):
            keep = ~self._bool().jeff
            a = self.compile_term(t.arg)
            return lambda env: a(env) & keep
        if isinstance(t, BVal):
            return self._bool().bval(t.formula)
        raise EvalError(f"cannot evaluate term {t!r}")

    # formulas ---------------------------------------------------------
    def _formula(self, f):
        if isinstance(f, Top):
            return lambda env: True
        if isinstance(f, Bottom):
            return lambda env: False
        if isinstance(f, Rel):
            r = self.backend.rel(f.name)
            args = [self.compile_term(a) for a in f.args]
            return lambda env: r(tuple(a(env) for a in args))
        if isinstance(f, Eq):
            a, b = self.compile_term(f.left), self.compile_term(f.right)
            return lambda env: a(env) == b(env)
        if isinstance(f, Le):
            a, b = self.compile_term(f.left), self.compile_term(f.right)
            return lambda env: a(env) & ~b(env) == 0
        if isinstance(f, At):
            self._bool()
            a, n = self.compile_term(f.term), f.n
            return lambda env: bin(a(env)).count("1") == n
        if isinstance(f, InJ):
            outside = ~self._bool().jeff
            a = self.compile_term(f.term)
            return lambda env: a(env) & outside == 0
        if isinstance(f, Not):
            a = self.compile(f.arg)
            return lambda env: not a(env)
        if isinstance(f, And):
            a, b = self.compile(f.left), self.compile(f.right)
            return lambda env: a(env) and b(env)
        if isinstance(f, Or):
            a, b = self.compile(f.left), self.compile(f.right)
            return lambda env: a(env) or b(env)
        if isinstance(f, Implies):
            a, b = self.compile(f.left), self.compile(f.right)
            return lambda env: (not a(env)) or b(env)
        if isinstance(f, (Exists, Forall)):
            return self._quantifier(f)
        raise EvalError(f"cannot evaluate formula {f!r}")

    def _quantifier(self, f):
        if self.naive:
            name = f.var.name
            uni = self.backend.universe(f.var.sort)
            body = self.compile(f.body)
            want = isinstance(f, Exists)

            def naive(env):
                old = env.get(name, _MISSING)
                try:
                    for v in uni:
                        env[name] = v
                        if bool(body(env)) == want:
                            return want
                    return not want
                finally:
                    if old is _MISSING:
                        env.pop(name, None)
                    else:
                        env[name] = old
            return naive

        cls = type(f)
        chain = []
        g = f
        while isinstance(g, cls):
            chain.append(g.var)
            g = g.body
        names = [v.name for v in chain]
        unis = [self.backend.universe(v.sort) for v in chain]
        position = {n: k for k, n in enumerate(names)}
        parts = _flatten(g, And if cls is Exists else Or)
        levels = [[] for _ in chain]
        pre = []
        for p in parts:
            lvl = max((position[n] for n in free_vars(p) if n in position), default=-1)
            (pre if lvl < 0 else levels[lvl]).append(self.compile(p))
        K = len(chain)
        exists = cls is Exists

        if exists:
            def rec(env, k):
                name, checks = names[k], levels[k]
                for v in unis[k]:
                    env[name] = v
                    for c in checks:
                        if not c(env):
                            break
                    else:
                        if k + 1 == K or rec(env, k + 1):
                            return True
                return False
        else:
            def rec(env, k):
                name, checks = names[k], levels[k]
                for v in unis[k]:
                    env[name] = v
                    for c in checks:
                        if c(env):
                            break
                    else:
                        if k + 1 == K or not rec(env, k + 1):
                            return False
                return True

        def run(env):
            for c in pre:
                if bool(c(env)) != exists:
                    return not exists
            saved = [env.get(n, _MISSING) for n in names]
            try:
                return rec(env, 0)
            finally:
                for n, old in zip(names, saved):
                    if old is _MISSING:
                        env.pop(n, None)
                    else:
                        env[n] = old

        fv = tuple(free_vars(f))
        memo = {}

        def cached(env):
            key = tuple(env[v] for v in fv)
            r = memo.get(key)
            if r is None:
                r = memo[key] = run(env)
            return r
        return cached


def evaluate(model, x, asg: Optional[Mapping] = None, naive: bool = False):
    """Truth value of a formula, or value of a term, under ``asg``.

    Product elements are tuples (one coordinate per factor); B-sort values
    are bitsets or iterables of indices.
    """
    ev = Evaluator(model, naive=naive)
    if isinstance(x, Formula):
        return ev.truth(x, asg)
    return ev.value(x, asg)


def assignments(model, variables):
    """Every assignment of ``variables`` over the model's universes."""
    return Evaluator(model).assignments(variables)
