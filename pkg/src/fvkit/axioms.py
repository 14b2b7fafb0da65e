"""Brute-force checks that a finite product satisfies the axioms of T^boole.

Each check returns the number of instances examined and a list of failure
descriptions; the sweep collects them in an ``AxiomReport``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import List, Sequence

from .evaluate import Evaluator
from .logic import (
    And, B, BConst, BVal, Compl, Eq, Exists, Forall, Formula, FreshNames, Join, Meet, Not, Or,
    Top, Var, all_var_names, conj, free_vars, substitute,
)
from .structures import ProductModel, ReducedModel, glue, indices_of


@dataclass
class AxiomReport:
    checks: int = 0
    failures: List[str] = field(default_factory=list)

    def add(self, n, failures=()):
        self.checks += n
        self.failures.extend(failures)

    @property
    def ok(self):
        return not self.failures


U, V, W = Var("u", B), Var("v", B), Var("w", B)

BA_LAWS = [
    Eq(Meet(U, V), Meet(V, U)),
    Eq(Join(U, V), Join(V, U)),
    Eq(Meet(U, Meet(V, W)), Meet(Meet(U, V), W)),
    Eq(Join(U, Join(V, W)), Join(Join(U, V), W)),
    Eq(Meet(U, Join(U, V)), U),
    Eq(Join(U, Meet(U, V)), U),
    Eq(Meet(U, Join(V, W)), Join(Meet(U, V), Meet(U, W))),
    Eq(Join(U, Meet(V, W)), Meet(Join(U, V), Join(U, W))),
    Eq(Meet(U, Compl(U)), BConst(0)),
    Eq(Join(U, Compl(U)), BConst(1)),
    Eq(Compl(Compl(U)), U),
    Not(Eq(BConst(0), BConst(1))),
]


def check_boolean_algebra(p: ProductModel):
    """Boolean algebra: the Boolean-sort operations satisfy the BA identities."""
    ev = Evaluator(p)
    fails, n = [], 0
    for law in BA_LAWS:
        fv = list(free_vars(law).values())
        for asg in ev.assignments(fv):
            n += 1
            if not ev.truth(law, asg):
                fails.append(f"{p!r}: BA law fails at {asg}")
    return n, fails


def _closure(f: Formula, variables: Sequence[Var]) -> Formula:
    for v in reversed(list(variables)):
        f = Forall(v, f)
    return f


def check_transfer(p: ProductModel, phi: Formula):
    """Transfer: if every factor satisfies the universal closure of phi,
    then [phi] = 1 everywhere."""
    fv = list(free_vars(phi).values())
    closed = _closure(phi, fv)
    if not all(Evaluator(m).truth(closed) for m in p.factors):
        return 0, []
    ev = Evaluator(p)
    term = BVal(phi)
    fails, n = [], 0
    for asg in ev.assignments(fv):
        n += 1
        if ev.value(term, asg) != p.full:
            fails.append(f"{p!r}: [phi] != 1 for a factor-valid phi at {asg}")
    return n, fails


def check_homomorphism(p: ProductModel, phi: Formula, psi: Formula):
    """Homomorphism: phi -> [phi](a) preserves the connectives and ignores
    dummy variables."""
    fv = dict(free_vars(phi))
    fv.update(free_vars(psi))
    variables = list(fv.values())
    ev = Evaluator(p)
    dummy = Var("dummy", p.signature.sorts[0])
    padded = And(phi, Eq(dummy, dummy))
    fails, n = [], 0
    tp, tq = BVal(phi), BVal(psi)
    for asg in ev.assignments(variables):
        a, b = ev.value(tp, asg), ev.value(tq, asg)
        checks = [
            (ev.value(BVal(Not(phi)), asg), p.full ^ a),
            (ev.value(BVal(And(phi, psi)), asg), a & b),
            (ev.value(BVal(Or(phi, psi)), asg), a | b),
        ]
        for extra in p.universe(dummy.sort)[:2]:
            checks.append((ev.value(BVal(padded), dict(asg, dummy=extra)), a))
        n += len(checks)
        for got, want in checks:
            if got != want:
                fails.append(f"{p!r}: Boolean value not homomorphic at {asg}")
                break
    return n, fails


def _labelings(n, k):
    return itertools.product(range(k), repeat=n)


def check_glue(p: ProductModel, rng: random.Random, samples=200):
    """Gluing: for a partition of unity b_1..b_k and elements a_1..a_k the
    splice a satisfies [a = a_i] >= b_i.  Exhaustive for k = 2, sampled for
    k = 3."""
    ev = Evaluator(p)
    fails, n = [], 0
    for sort in p.signature.sorts:
        x, y = Var("x", sort), Var("y", sort)
        same = BVal(Eq(x, y))
        uni = p.universe(sort)
        instances = []
        for lab in _labelings(p.n, 2):
            for pair in itertools.product(uni, repeat=2):
                instances.append((lab, pair))
        for _ in range(samples):
            lab = tuple(rng.randrange(3) for _ in range(p.n))
            instances.append((lab, tuple(rng.choice(uni) for _ in range(3))))
        for lab, elems in instances:
            parts = [(sum(1 << i for i, c in enumerate(lab) if c == k), a)
                     for k, a in enumerate(elems)]
            a = glue(parts, p.n)
            n += 1
            for b, ai in parts:
                if ev.value(same, {"x": a, "y": ai}) & b != b:
                    fails.append(f"{p!r}: glue misses part {indices_of(b)}")
                    break
    return n, fails


def check_axiom4(p: ProductModel, phis: Sequence[Formula], x: Var, rng: random.Random,
                 samples=60):
    """Witness gluing, with psi_i := exists x phi_i so that the premise is valid.

    For disjoint b_i with [psi_i(y)] >= b_i, a witness x with
    [phi_i(x, y)] >= b_i is built by gluing coordinatewise witnesses.
    """
    ev = Evaluator(p)
    factor_ev = [Evaluator(m) for m in p.factors]
    psis = [Exists(x, phi) for phi in phis]
    fails, n = [], 0
    ys = {}
    for phi in phis:
        ys.update((k, v) for k, v in free_vars(phi).items() if k != x.name)
    y_asgs = list(ev.assignments(list(ys.values())))
    for _ in range(samples):
        asg = rng.choice(y_asgs) if y_asgs else {}
        values = [ev.value(BVal(psi), asg) for psi in psis]
        # random disjoint b_i below the psi values
        owner = []
        for i in range(p.n):
            ok = [k for k, v in enumerate(values) if v >> i & 1]
            owner.append(rng.choice(ok + [None]) if ok else None)
        bs = [sum(1 << i for i in range(p.n) if owner[i] == k) for k in range(len(phis))]
        coords = []
        for i, m in enumerate(p.factors):
            k = owner[i]
            if k is None:
                coords.append(m.designated[x.sort])
                continue
            local = {name: val[i] for name, val in asg.items()}
            for e in m.universes[x.sort]:
                if factor_ev[i].truth(phis[k], dict(local, **{x.name: e})):
                    coords.append(e)
                    break
            else:
                fails.append(f"{p!r}: no local witness although [psi] holds at {i}")
                coords.append(m.designated[x.sort])
        witness = tuple(coords)
        n += 1
        for phi, b in zip(phis, bs):
            got = ev.value(BVal(phi), dict(asg, **{x.name: witness}))
            if got & b != b:
                fails.append(f"{p!r}: glued witness fails witness gluing at {asg}")
                break
    return n, fails


def check_quotient(p: ProductModel, phi: Formula):
    """Boolean values on M/J are those of M reduced mod J, for every
    representative of a class."""
    if not p.j_atoms:
        return 0, []
    r = ReducedModel(p)
    ev, rev = Evaluator(p), Evaluator(r)
    fv = list(free_vars(phi).values())
    term = BVal(phi)
    active = r.active
    fails, n = [], 0
    for asg in ev.assignments(fv):
        n += 1
        want = ev.value(term, asg) & active
        canon = {v.name: r.canonical(v.sort, asg[v.name]) for v in fv}
        if ev.value(term, canon) & active != want or rev.value(term, asg) != want:
            fails.append(f"{p!r}: Boolean value not well defined mod J at {asg}")
    return n, fails


def exists_more_than(k: int, x: Var, phi: Formula) -> Formula:
    """exists^{>k} x phi: k+1 distinct elements satisfying phi."""
    fresh = FreshNames(all_var_names(phi))
    zs = [Var(fresh("z"), x.sort) for _ in range(k + 1)]
    parts = [substitute(phi, {x.name: z}) for z in zs]
    parts += [Not(Eq(a, b)) for a, b in itertools.combinations(zs, 2)]
    body = conj(*parts) if parts else Top()
    for z in reversed(zs):
        body = Exists(z, body)
    return body


def check_counting(model, phi: Formula, x: Var, max_k=2):
    """The exists^{>k} formula agrees with a direct count of solutions."""
    ev = Evaluator(model)
    others = [v for n, v in free_vars(phi).items() if n != x.name]
    fails, n = [], 0
    for asg in ev.assignments(others):
        count = sum(1 for e in ev.backend.universe(x.sort)
                    if ev.truth(phi, dict(asg, **{x.name: e})))
        for k in range(max_k + 1):
            n += 1
            if ev.truth(exists_more_than(k, x, phi), asg) != (count > k):
                fails.append(f"{model!r}: exists^>{k} disagrees with the count {count}")
    return n, fails
