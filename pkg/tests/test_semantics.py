import itertools

import pytest

from fvkit.evaluate import EvalError, Evaluator, evaluate
from fvkit.logic import B, Signature, Var
from fvkit.structures import (
    FiniteStructure, ReducedModel, StructureError, glue, indices_of, product, pure_set,
    quotient, set_structure,
)
from fvkit.syntax import parse

PURE = Signature(("S",))


def test_boolean_value_of_equality():
    m = FiniteStructure(PURE, {"S": ("a", "b")}, name="M")
    p = product([m, m])
    f = parse("(= x y)", PURE, {"x": "S", "y": "S"})
    from fvkit.logic import BVal
    v = Evaluator(p).value(BVal(f), {"x": ("a", "a"), "y": ("a", "b")})
    assert indices_of(v) == [0]


def test_homomorphism_on_negation():
    m = set_structure(2)
    p = product([m, set_structure(1), m])
    sig = m.signature
    from fvkit.logic import BVal, Not
    phi = parse("(= x c)", sig, {"x": "S"})
    ev = Evaluator(p)
    for asg in ev.assignments([Var("x", "S")]):
        assert ev.value(BVal(Not(phi)), asg) == p.full ^ ev.value(BVal(phi), asg)


def test_exists_two_atoms_on_three_indices():
    p = product([pure_set(1)] * 3)
    f = parse("(exists (u B) (AT 2 u))", PURE)
    assert evaluate(p, f) is True


def test_set_product_size():
    p = product([set_structure(2), set_structure(3)])
    assert len(p.universe("S")) == 12


def test_single_factor_product():
    m = set_structure(2)
    p = product([m])
    assert p.full == 1 and len(p.universe("S")) == 3


def test_full_ideal_quotient_is_one_point():
    p = product([set_structure(1), set_structure(2)], [0, 1])
    assert p.quotient_trivial
    r = quotient(p)
    assert len({r.canonical("S", a) for a in p.universe("S")}) == 1


def test_zero_ideal_quotient_is_identity():
    p = product([set_structure(1), set_structure(1)])
    r = quotient(p)
    assert len({r.canonical("S", a) for a in p.universe("S")}) == 4


def test_atom_zero_ideal_classes():
    p = product([set_structure(1), set_structure(1)], [0])
    r = ReducedModel(p)
    for a, b in itertools.product(p.universe("S"), repeat=2):
        assert r.same_class(a, b) == (a[1] == b[1])


def test_quotient_well_defined():
    p = product([set_structure(1), set_structure(2)], [0])
    r = ReducedModel(p)
    sig = p.signature
    from fvkit.logic import BVal
    phi = parse("(exists (y S) (and (not (= y x)) (not (= y c))))", sig, {"x": "S"})
    ev, rev = Evaluator(p), Evaluator(r)
    for a, b in itertools.product(p.universe("S"), repeat=2):
        if r.same_class(a, b):
            va = ev.value(BVal(phi), {"x": a}) & r.active
            vb = ev.value(BVal(phi), {"x": b}) & r.active
            assert va == vb == rev.value(BVal(phi), {"x": a})


def test_glue_single_part():
    a = ("p", "q")
    assert glue([(0b11, a)]) == a


def test_glue_two_parts():
    x, y = ("x0", "x1"), ("y0", "y1")
    assert glue([({0}, x), ({1}, y)]) == ("x0", "y1")


def test_glue_rejects_non_partition():
    with pytest.raises(StructureError):
        glue([({0}, ("a", "b")), ({0, 1}, ("a", "b"))])
    with pytest.raises(StructureError):
        glue([({0}, ("a", "b"))])


def test_structure_validation():
    with pytest.raises(StructureError):
        FiniteStructure(PURE, {"S": ()})
    sig = Signature(("S",), functions={"f": (("S",), "S")}, constants={"c": "S"})
    with pytest.raises(StructureError):
        FiniteStructure(sig, {"S": ("a",)}, constants={"c": "a"})
    with pytest.raises(StructureError):
        FiniteStructure(sig, {"S": ("a",)}, functions={"f": {("a",): "a"}}, constants={"c": "z"})


def test_product_signature_mismatch():
    with pytest.raises(StructureError):
        product([set_structure(1), pure_set(2)])
    with pytest.raises(StructureError):
        product([])


def test_unbound_variable():
    with pytest.raises(EvalError):
        evaluate(set_structure(1), parse("(= x c)", set_structure(1).signature, {"x": "S"}))


def test_naive_and_memoized_agree():
    p = product([set_structure(1), set_structure(2)], [1])
    sig = p.signature
    f = parse("(forall (x S) (exists (u B) (and (<= u ([ (= x c) ])) (not (J u)))))", sig)
    assert evaluate(p, f) == evaluate(p, f, naive=True)


def test_powerset_sentence_on_reduced_model():
    p = product([set_structure(1)] * 3, [0])
    f = parse("(exists (u B) (and (not (= u 0)) (J u)))", p.signature)
    assert evaluate(p, f) is True
    assert evaluate(ReducedModel(p), f) is False
