import random

import pytest

from fvkit.imaginaries import (
    CapExceeded, DefinableSet, automorphisms, factor_points, ez, is_union_of_classes, preserves_structure,
    rectangle_code, render_code, weak_ei_code,
)
from fvkit.library import GRAPH_SIGNATURE, graph2, graph3
from fvkit.logic import Signature, Var
from fvkit.structures import FiniteStructure, SET_SIGNATURE, product, set_structure
from fvkit.syntax import parse

PURE = Signature(("S",))


def pure(n, name="E"):
    return FiniteStructure(PURE, {"S": tuple(f"e{k}" for k in range(n))}, name=name)


def random_set(p, sorts, rng, density=0.4):
    Z = DefinableSet(p, sorts, frozenset())
    return Z.with_extension(d for d in Z.domain() if rng.random() < density)


def test_aut_rigid_factor():
    assert automorphisms(product([set_structure(1)])).order == 1


def test_aut_two_pure_pairs():
    p = product([pure(2), pure(2)])
    g = automorphisms(p)
    assert g.order == 8
    assert all(preserves_structure(p, a) for a in g.elements)


def test_aut_contains_identity():
    p = product([graph2(), graph3()])
    g = automorphisms(p)
    z = DefinableSet.from_formula(p, parse("(P x)", GRAPH_SIGNATURE, {"x": "S"}), [Var("x", "S")])
    assert any(a.act_set(z).extension == z.extension and a.act_mask(0b01) == 0b01
               for a in g.elements)


def test_aut_cap():
    with pytest.raises(CapExceeded):
        automorphisms(product([pure(4)] * 3), size_cap=10)


def test_rectangle_full_and_singleton():
    p = product([pure(2), pure(3)])
    full = DefinableSet(p, ("S",), frozenset())
    full = full.with_extension(full.domain())
    rc = rectangle_code(full)
    assert len(rc.cols) == 1 and rc.pairs == ((0, 0),)
    assert rc.reconstruct(2) == full.extension
    one = full.with_extension({(("e0",), ("e1",))})
    rc = rectangle_code(one)
    assert set(rc.cols) == {frozenset(), frozenset({(("e1",),)})}
    assert len(rc.pairs) == 1
    assert rc.reconstruct(2) == one.extension


def test_rectangle_errors():
    p = product([pure(2), pure(2)])
    with pytest.raises(ValueError):
        rectangle_code(DefinableSet(p, ("S",), frozenset()), side=[5])


def test_random_reconstruction_three_by_three():
    rng = random.Random(3)
    p = product([pure(3), pure(3)])
    for _ in range(50):
        Z = random_set(p, ("S",), rng)
        assert rectangle_code(Z).reconstruct(2) == Z.extension
        assert weak_ei_code(Z).reconstruct(Z.domain()) == Z.extension


def test_singleton_class_counts():
    p = product([set_structure(2)] * 3)
    Z = DefinableSet(p, ("S",), frozenset({(("p0",), ("p1",), ("p2",))}))
    assert ez(Z).class_counts() == [2, 2, 2]
    assert is_union_of_classes(Z)


def test_empty_set_code():
    p = product([set_structure(2)] * 2)
    code = weak_ei_code(DefinableSet(p, ("S",), frozenset()))
    assert code.image == frozenset()
    assert render_code(code) == "(code (gamma (0 (block p0 p1 p2)) (1 (block p0 p1 p2))) (quotient))"


def test_invariant_set_has_fixed_code():
    p = product([pure(2), pure(2)])
    x, y = Var("x", "S"), Var("y", "S")
    f = parse("(= ([ (= x y) ]) 1)", PURE, {"x": "S", "y": "S"})
    Z = DefinableSet.from_formula(p, f, [x, y])
    code = weak_ei_code(Z)
    for g in automorphisms(p).elements:
        assert g.act_set(Z).extension == Z.extension
        assert g.act_code(code, Z.sorts) == code


def test_equivariance():
    rng = random.Random(5)
    p = product([pure(2), pure(2), pure(3)])
    group = automorphisms(p)
    for _ in range(20):
        Z = random_set(p, ("S",), rng)
        code = weak_ei_code(Z)
        for g in group.elements:
            assert weak_ei_code(g.act_set(Z)) == g.act_code(code, Z.sorts)


def test_presentation_independence():
    p = product([graph2(), graph3()])
    x = Var("x", "S")
    f = parse("(= ([ (P x) ]) 1)", GRAPH_SIGNATURE, {"x": "S"})
    g = parse("(not (exists (u B) (and (= u ([ (not (P x)) ])) (not (= u 0)))))",
              GRAPH_SIGNATURE, {"x": "S"})
    a = DefinableSet.from_formula(p, f, [x])
    b = DefinableSet.from_formula(p, g, [x])
    assert a.extension == b.extension
    assert render_code(weak_ei_code(a)) == render_code(weak_ei_code(b))


def test_render_is_sorted():
    p = product([set_structure(1), set_structure(2)])
    Z = DefinableSet(p, ("S",), frozenset({(("p1",), ("p2",)), (("p0",), ("p0",))}))
    text = render_code(weak_ei_code(Z))
    assert text.startswith("(code (gamma (0 (block p0) (block p1)) (1 ")
    assert text == render_code(weak_ei_code(Z.with_extension(set(Z.extension))))


def test_class_bound():
    rng = random.Random(9)
    p = product([pure(3), pure(2)])
    for _ in range(30):
        Z = random_set(p, ("S", "S"), rng)
        for m, part in zip(p.factors, ez(Z).partitions):
            assert 1 <= len(part) <= len(factor_points(m, Z.sorts))
