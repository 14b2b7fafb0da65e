"""Property tests driven by hypothesis.

Random formulas come from the seeded generators, with hypothesis choosing
the seed; EPSets and subsets are drawn directly.
"""

import random

from hypothesis import given, strategies as st

from fvkit.ba import eval_powerset, qe
from fvkit.epset import EPSet, parse_ep, render_ep
from fvkit.evaluate import Evaluator
from fvkit.fv import translate
from fvkit.imaginaries import (
    DefinableSet, automorphisms, ez, factor_points, is_union_of_classes, rectangle_code,
    weak_ei_code,
)
from fvkit.library import families, sweep_products
from fvkit.logic import (
    And, B, Const, Implies, Not, Or, Signature, Var, alpha_equivalent, free_vars,
    is_quantifier_free, substitute,
)
from fvkit.randgen import BooleanSentenceGen, FormulaGen
from fvkit.structures import FiniteStructure, product
from fvkit.syntax import parse_formula_file, render_formula_file

from oracle import holds

FAMILIES = families()
SMALL = {f.name: sweep_products(f, 2, 2)[:6] for f in FAMILIES}
seeds = st.integers(0, 10 ** 6)
family = st.sampled_from(FAMILIES)


def random_formula(fam, seed, depth=3):
    gen = FormulaGen(fam.signature, random.Random(seed), max_depth=depth)
    free = gen.free_variables()
    return gen.formula(free), free


def variables_of(f, free):
    out = {v.name: v for v in free}
    out.update(free_vars(f))
    return list(out.values())


# ---------------------------------------------------------------- syntax

@given(family, seeds)
def test_round_trip(fam, seed):
    f, free = random_formula(fam, seed)
    decl = {v.name: v.sort for v in variables_of(f, free)}
    g, decl2 = parse_formula_file(render_formula_file(f, decl), fam.signature)
    assert alpha_equivalent(f, g)
    assert dict(decl2) == decl


@given(family, seeds)
def test_substitution_lemma(fam, seed):
    f, free = random_formula(fam, seed)
    base = [v for v in variables_of(f, free) if v.sort in fam.signature.sorts]
    if not base:
        return
    x = base[0]
    consts = [c for c, s in fam.signature.constants.items() if s == x.sort]
    t = Const(consts[0], x.sort) if consts else Var("fresh_t", x.sort)
    g = substitute(f, {x.name: t})
    for p in SMALL[fam.name][:3]:
        ev = Evaluator(p)
        for asg in ev.assignments(variables_of(f, free) + [Var("fresh_t", x.sort)]):
            shifted = dict(asg, **{x.name: ev.value(t, asg)})
            assert ev.truth(g, asg) == ev.truth(f, shifted)


# ---------------------------------------------------------------- translation

def agree_on_small(fam, f, g, variables):
    for p in SMALL[fam.name]:
        ev = Evaluator(p)
        for asg in ev.assignments(variables):
            if ev.truth(f, asg) != ev.truth(g, asg):
                return False
    return True


@given(family, seeds)
def test_translation_equivalence(fam, seed):
    f, free = random_formula(fam, seed, depth=2)
    nf = translate(f)
    assert agree_on_small(fam, f, nf.embed(), variables_of(f, free))


@given(family, seeds)
def test_translation_idempotent(fam, seed):
    f, free = random_formula(fam, seed, depth=2)
    once = translate(f).embed()
    twice = translate(once).embed()
    assert agree_on_small(fam, once, twice, variables_of(f, free))


@given(family, seeds)
def test_cell_bound(fam, seed):
    f, _ = random_formula(fam, seed, depth=2)
    nf = translate(f)
    atoms = set()
    for c in nf.cells:
        stack = [c]
        while stack:
            y = stack.pop()
            if isinstance(y, Not):
                stack.append(y.arg)
            elif isinstance(y, (And, Or, Implies)):
                stack += [y.left, y.right]
            else:
                atoms.add(y)
    assert len(nf.cells) <= 2 ** len(atoms)
    assert len(set(nf.cells)) == len(nf.cells)


# ---------------------------------------------------------------- Boolean algebras

@given(seeds, st.integers(1, 4))
def test_qe_sound(seed, n):
    gen = BooleanSentenceGen(random.Random(seed), max_quantifiers=2)
    free = [Var("p", B)]
    f = gen.sentence(free)
    g = qe(f)
    assert is_quantifier_free(g)
    for mask in range(1 << n):
        asg = {"p": mask} if "p" in free_vars(f) or "p" in free_vars(g) else {}
        assert holds(f, n, asg) == holds(g, n, asg)


@given(seeds, st.integers(1, 5))
def test_powerset_evaluator_matches_oracle(seed, n):
    f = BooleanSentenceGen(random.Random(seed), max_quantifiers=2).sentence()
    assert eval_powerset(n, f) == holds(f, n)


bits = st.text(alphabet="01", max_size=5)
epsets = st.builds(EPSet, bits, st.text(alphabet="01", min_size=1, max_size=4))


def members(s, n=60):
    return {i for i in range(n) if i in s}


@given(epsets, epsets, epsets)
def test_epset_algebra(a, b, c):
    assert members(a & b) == members(a) & members(b)
    assert members(a | b) == members(a) | members(b)
    assert members(~a) == set(range(60)) - members(a)
    assert a & (b | c) == (a & b) | (a & c)
    assert ~(a & b) == ~a | ~b
    assert (a <= b) == (a & b == a)
    assert parse_ep(render_ep(a)) == a
    assert a.is_finite() == (a.count() is not None)


# ---------------------------------------------------------------- imaginaries

PURE = Signature(("S",))


def pure(n):
    return FiniteStructure(PURE, {"S": tuple(f"e{k}" for k in range(n))})


shapes = st.lists(st.integers(1, 3), min_size=1, max_size=3)


@given(shapes, seeds)
def test_codes_reconstruct(sizes, seed):
    rng = random.Random(seed)
    p = product([pure(k) for k in sizes])
    Z = DefinableSet(p, ("S",), frozenset())
    Z = Z.with_extension(d for d in Z.domain() if rng.random() < 0.5)
    dom = Z.domain()
    assert weak_ei_code(Z).reconstruct(dom) == Z.extension
    assert is_union_of_classes(Z)
    if p.n >= 2:
        assert rectangle_code(Z).reconstruct(p.n) == Z.extension
    for i, (m, part) in enumerate(zip(p.factors, ez(Z).partitions)):
        fibers = {frozenset(d[:i] + d[i + 1:] for d in Z.extension if d[i] == e)
                  for e in factor_points(m, Z.sorts)}
        assert len(part) == len(fibers)


@given(shapes, seeds)
def test_codes_equivariant(sizes, seed):
    rng = random.Random(seed)
    p = product([pure(k) for k in sizes])
    Z = DefinableSet(p, ("S",), frozenset())
    Z = Z.with_extension(d for d in Z.domain() if rng.random() < 0.5)
    code = weak_ei_code(Z)
    for g in automorphisms(p).elements:
        assert weak_ei_code(g.act_set(Z)) == g.act_code(code, Z.sorts)
