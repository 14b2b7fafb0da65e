"""Seeded random formulas for the sweeps.

Everything is driven by a ``random.Random`` passed in by the caller, so a
seed fixes the whole suite.
"""

from __future__ import annotations

import random
from typing import List, Sequence

from .logic import (
    And, App, At, B, BBAR, BConst, BVal, Bar, Compl, Const, Eq, Exists, Forall, Formula,
    Implies, InJ, Join, Le, Meet, Not, Or, Rel, Signature, Term, Var,
)


class FormulaGen:
    """Random L^boole formulas over a signature.

    ``max_depth`` bounds the depth as measured by ``logic.depth`` (so formulas
    inside ``[ ]`` use up the budget too), ``max_rel_atoms`` the number of
    relation atoms besides equality, and ``inner_depth`` the depth of formulas
    inside ``[ ]``.
    """

    def __init__(self, sig: Signature, rng: random.Random, max_depth=3, max_rel_atoms=2,
                 inner_depth=2, mixed=True, boolean_quantifiers=True):
        self.sig = sig
        self.rng = rng
        self.max_depth = max_depth
        self.max_rel_atoms = max_rel_atoms
        self.inner_depth = inner_depth
        self.mixed = mixed
        self.boolean_quantifiers = boolean_quantifiers
        self._rels_left = 0
        self._count = 0

    # entry points ----------------------------------------------------
    def free_variables(self, max_base=2, max_bool=1) -> List[Var]:
        rng = self.rng
        out = []
        for k in range(rng.randint(0, max_base)):
            out.append(Var(f"x{k + 1}", rng.choice(self.sig.sorts)))
        if rng.randint(0, max_bool):
            out.append(Var("u1", B))
        return out

    def formula(self, free: Sequence[Var], depth=None) -> Formula:
        self._rels_left = self.max_rel_atoms
        self._count = 0
        return self._formula(self.max_depth if depth is None else depth, list(free))

    # internals -------------------------------------------------------
    def _fresh(self, stem):
        self._count += 1
        return f"{stem}{self._count}"

    def _formula(self, depth, scope, base_only=False):
        rng = self.rng
        if depth <= 1 or rng.random() < 0.25:
            return self._atom(scope, base_only, depth - 1)
        choice = rng.random()
        if choice < 0.15:
            return Not(self._formula(depth - 1, scope, base_only))
        if choice < 0.45:
            op = rng.choice((And, Or, Or, And, Implies))
            return op(self._formula(depth - 1, scope, base_only),
                      self._formula(depth - 1, scope, base_only))
        q = rng.choice((Exists, Forall))
        sorts = list(self.sig.sorts)
        if not base_only and self.boolean_quantifiers and rng.random() < 0.3:
            sort = B
        else:
            sort = rng.choice(sorts)
        v = Var(self._fresh("y" if sort != B else "w"), sort)
        return q(v, self._formula(depth - 1, scope + [v], base_only))

    def _atom(self, scope, base_only, room):
        rng = self.rng
        if not base_only and self.mixed and rng.random() < 0.5:
            return self._boolean_atom(scope, min(room, self.inner_depth))
        return self._base_atom(scope)

    def _base_atom(self, scope):
        rng = self.rng
        rels = list(self.sig.relations)
        if rels and self._rels_left > 0 and rng.random() < 0.5:
            name = rng.choice(rels)
            self._rels_left -= 1
            return Rel(name, tuple(self._base_term(s, scope) for s in self.sig.relations[name]))
        sort = rng.choice([v.sort for v in scope if v.sort not in (B, BBAR)] or
                          list(self.sig.sorts))
        return Eq(self._base_term(sort, scope), self._base_term(sort, scope))

    def _base_term(self, sort, scope) -> Term:
        rng = self.rng
        options: List[Term] = [v for v in scope if v.sort == sort]
        options += [Const(c, s) for c, s in self.sig.constants.items() if s == sort]
        if not options:
            raise ValueError(f"no term of sort {sort}")
        t = rng.choice(options)
        funs = [f for f, (args, res) in self.sig.functions.items()
                if res == sort and args == (sort,)]
        if funs and rng.random() < 0.3:
            t = App(rng.choice(funs), (t,), sort)
        return t

    def _boolean_term(self, scope, inner, size=2) -> Term:
        rng = self.rng
        r = rng.random()
        if size > 0 and r < 0.3:
            op = rng.choice((Meet, Join))
            return op(self._boolean_term(scope, inner, size - 1),
                      self._boolean_term(scope, inner, size - 1))
        if size > 0 and r < 0.4:
            return Compl(self._boolean_term(scope, inner, size - 1))
        bvars = [v for v in scope if v.sort == B]
        if bvars and r < 0.6:
            return rng.choice(bvars)
        if r < 0.65 or inner < 1:
            return BConst(rng.randint(0, 1))
        base_scope = [v for v in scope if v.sort not in (B, BBAR)]
        return BVal(self._formula(inner, base_scope, base_only=True))

    def _boolean_atom(self, scope, inner):
        rng = self.rng
        r = rng.random()
        if r < 0.35:
            return Eq(self._boolean_term(scope, inner), self._boolean_term(scope, inner))
        if r < 0.6:
            return Le(self._boolean_term(scope, inner), self._boolean_term(scope, inner))
        if r < 0.85:
            return At(rng.randint(0, 3), self._boolean_term(scope, inner))
        if r < 0.93:
            return InJ(self._boolean_term(scope, inner))
        return Eq(Bar(self._boolean_term(scope, inner, 1)), Bar(self._boolean_term(scope, inner, 1)))


class BooleanSentenceGen:
    """Random sentences (or formulas) in the pure language of Boolean algebras."""

    def __init__(self, rng: random.Random, max_quantifiers=2, max_at=3, ideal=False):
        self.rng = rng
        self.max_quantifiers = max_quantifiers
        self.max_at = max_at
        self.ideal = ideal

    def sentence(self, free: Sequence[Var] = ()) -> Formula:
        self._count = 0
        self._left = self.max_quantifiers
        return self._formula(list(free), 4)

    def _formula(self, scope, depth):
        rng = self.rng
        if depth > 1 and self._left > 0 and (not scope or rng.random() < 0.5):
            self._left -= 1
            self._count += 1
            v = Var(f"v{self._count}", B)
            q = rng.choice((Exists, Forall))
            return q(v, self._formula(scope + [v], depth - 1))
        if depth > 1 and rng.random() < 0.55:
            op = rng.choice((And, Or, Implies))
            if rng.random() < 0.2:
                return Not(self._formula(scope, depth - 1))
            return op(self._formula(scope, depth - 1), self._formula(scope, depth - 1))
        return self._atom(scope)

    def _term(self, scope, size=1):
        rng = self.rng
        r = rng.random()
        if size > 0 and r < 0.3:
            return rng.choice((Meet, Join))(self._term(scope, size - 1), self._term(scope, size - 1))
        if size > 0 and r < 0.45:
            return Compl(self._term(scope, size - 1))
        if scope and r < 0.92:
            return rng.choice(scope)
        return BConst(rng.randint(0, 1))

    def _atom(self, scope):
        rng = self.rng
        r = rng.random()
        if self.ideal and r < 0.25:
            return InJ(self._term(scope))
        if r < 0.5:
            return At(rng.randint(0, self.max_at), self._term(scope))
        if r < 0.75:
            return Eq(self._term(scope), self._term(scope))
        return Le(self._term(scope), self._term(scope))


def seeded(seed, label) -> random.Random:
    """Independent generator per suite, derived from one seed."""
    return random.Random(f"{seed}:{label}")


__all__ = ["BooleanSentenceGen", "FormulaGen", "seeded"]
