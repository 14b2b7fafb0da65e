import pytest

from fvkit.evaluate import Evaluator
from fvkit.fv import (
    FVNormalForm, TranslateError, eliminate_exists, is_propositional_partition, parse_fv,
    part_formula, render_fv, slot, to_partition_form, translate,
)
from fvkit.library import GRAPH_SIGNATURE, families, sweep_products
from fvkit.logic import (
    And, B, BConst, BVal, Eq, Join, Meet, Not, Var, alpha_equivalent, free_vars,
)
from fvkit.structures import SET_SIGNATURE, ReducedModel, product, set_structure
from fvkit.syntax import parse

X = Var("x", "S")
P = parse("(P x)", GRAPH_SIGNATURE, {"x": "S"})
Q = parse("(R x c)", GRAPH_SIGNATURE, {"x": "S"})
S1 = parse("(R c x)", GRAPH_SIGNATURE, {"x": "S"})


def agree(model, f, g, variables):
    ev = Evaluator(model)
    return all(ev.truth(f, a) == ev.truth(g, a) for a in ev.assignments(variables))


def graph_products():
    fam = [f for f in families() if f.name == "graph"][0]
    return sweep_products(fam)


def test_single_split():
    beta = Eq(slot(0), BConst(1))
    nf = to_partition_form([P], beta)
    assert nf.cells == (P, Not(P))
    assert nf.boolean_part == beta


def test_four_cells_in_subset_order():
    nf = to_partition_form([P, Q], Eq(Meet(slot(0), slot(1)), BConst(0)), prune=False)
    assert nf.cells == (And(P, Q), And(P, Not(Q)), And(Not(P), Q), And(Not(P), Not(Q)))
    assert is_propositional_partition(nf.cells)


def test_three_cells_equivalent_on_set_products():
    sig = SET_SIGNATURE
    vs = {"x": "S", "y": "S"}
    cells = [parse("(= x c)", sig, vs), parse("(= y c)", sig, vs), parse("(= x y)", sig, vs)]
    beta = parse("(and (<= @1 (join @2 @3)) (not (= @3 0)))", sig,
                 {"@1": B, "@2": B, "@3": B})
    nf = to_partition_form(cells, beta)
    orig = FVNormalForm(tuple(cells), beta)
    p = product([set_structure(2)] * 3)
    assert agree(p, orig.embed(), nf.embed(), [Var("x", "S"), Var("y", "S")])
    # the sign vector x=c, y=c, not x=y is propositionally consistent but kept
    assert nf.k <= 8


def test_slot_count_mismatch():
    with pytest.raises(TranslateError):
        to_partition_form([P], Eq(slot(1), BConst(1)))


def test_part_formula_two():
    w1, w2 = Var("w1", B), Var("w2", B)
    expected = And(Eq(Meet(w1, w2), BConst(0)), Eq(Join(w1, w2), BConst(1)))
    assert part_formula([w1, w2]) == expected


def test_part_formula_one():
    w = Var("w1", B)
    assert part_formula([w]) == Eq(w, BConst(1))


def test_eliminate_exists_named_point():
    sig = SET_SIGNATURE
    a = parse("(= x c)", sig, {"x": "S"})
    body = FVNormalForm((a, Not(a)), Eq(slot(0), BConst(1)))
    nf = eliminate_exists(body, Var("x", "S"))
    assert [str(c) for c in nf.cells] == [str(parse("(exists (x S) (= x c))", sig)),
                                          str(parse("(exists (x S) (not (= x c)))", sig))]
    target = parse("(exists (x S) (= ([ (= x c) ]) 1))", sig)
    for sizes in ([1], [2], [1, 2], [2, 2], [0, 1], [0, 2, 1]):
        p = product([set_structure(n) for n in sizes])
        ev = Evaluator(p)
        assert ev.truth(nf.embed()) == ev.truth(target) is True


def test_eliminate_dummy_variable():
    sig = SET_SIGNATURE
    a = parse("(= y c)", sig, {"y": "S"})
    body = FVNormalForm((a, Not(a)), Eq(slot(0), BConst(1)))
    assert eliminate_exists(body, Var("x", "S")) == body


def test_translate_equality_slot():
    f = parse("(= ([ (= x y) ]) 1)", SET_SIGNATURE, {"x": "S", "y": "S"})
    nf = translate(f)
    eq = parse("(= x y)", SET_SIGNATURE, {"x": "S", "y": "S"})
    assert nf.cells == (eq, Not(eq))
    assert nf.boolean_part == Eq(slot(0), BConst(1))


def test_translate_exists_unary_on_sweep():
    f = parse("(exists (x S) (= ([ (P x) ]) 1))", GRAPH_SIGNATURE)
    nf = translate(f)
    assert not free_vars(nf.embed())
    for p in graph_products():
        ev = Evaluator(p)
        assert ev.truth(nf.embed()) == ev.truth(f)


def test_sentence_becomes_boolean_sentence():
    f = parse("(exists (x S) (and (P x) (not (R x c))))", GRAPH_SIGNATURE)
    nf = translate(f)
    assert all(not free_vars(c) for c in nf.cells)
    assert set(free_vars(nf.boolean_part)) <= {slot(k).name for k in range(nf.k)}
    for p in graph_products():
        ev = Evaluator(p)
        assert ev.truth(nf.embed()) == ev.truth(f)


def test_cell_limit_is_reported():
    # two nested base quantifiers over two atoms need 2^16 sign-vector cells
    f = parse("(forall (x S) (exists (y S) (and (R x y) (not (= x y)))))", GRAPH_SIGNATURE)
    with pytest.raises(TranslateError, match="cells"):
        translate(f)


def test_mixed_formula_on_reduced_products():
    f = parse("(exists (x S) (and (not (J ([ (= x c) ]))) (= (bar ([ (P x) ])) (bar 1))))",
              GRAPH_SIGNATURE)
    nf = translate(f)
    for p in graph_products():
        for model in (p, ReducedModel(p)):
            ev = Evaluator(model)
            assert ev.truth(nf.embed()) == ev.truth(f)


def test_reserved_slot_names():
    f = parse("(exists (w B) (= w 1))", SET_SIGNATURE)
    from fvkit.logic import Exists
    bad = Exists(Var("@1", B), Eq(Var("@1", B), BConst(1)))
    translate(f)
    with pytest.raises(TranslateError):
        translate(bad)


def test_render_parse_round_trip():
    f = parse("(exists (y S) (and (R x y) (AT 1 ([ (P y) ]))))", GRAPH_SIGNATURE, {"x": "S"})
    nf = translate(f)
    text = render_fv(nf)
    assert text.startswith("(fv (free (x S)) (cells ")
    back = parse_fv(text, GRAPH_SIGNATURE)
    assert len(back.cells) == nf.k
    assert all(alpha_equivalent(a, b) for a, b in zip(back.cells, nf.cells))
    assert alpha_equivalent(back.boolean_part, nf.boolean_part)


def test_translate_keeps_boolean_free_variables():
    f = parse("(<= u ([ (P x) ]))", GRAPH_SIGNATURE, {"x": "S", "u": B})
    nf = translate(f)
    assert "u" in nf.boolean_free_vars()
    for p in graph_products()[:5]:
        ev = Evaluator(p)
        for a in ev.assignments([Var("x", "S"), Var("u", B)]):
            assert ev.truth(nf.embed(), a) == ev.truth(f, a)
