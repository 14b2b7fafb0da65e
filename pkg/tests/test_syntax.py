import pytest

from fvkit.logic import (
    B, BVal, BConst, Eq, Exists, SortError, Signature, Var, alpha_equivalent,
    free_vars, substitute,
)
from fvkit.syntax import (
    FormulaError, parse, parse_formula_file, parse_signature, render, render_formula_file,
)
from fvkit.evaluate import Evaluator
from fvkit.structures import FiniteStructure

SIG = Signature(("S",), relations={"P": ("S",), "R": ("S", "S")}, functions={"f": (("S",), "S")},
                constants={"c": "S"})
XY = {"x": "S", "y": "S", "z": "S", "v": B}


def test_equality_atom():
    f = parse("(= x y)", SIG, XY)
    assert f == Eq(Var("x", "S"), Var("y", "S"))
    assert render(f) == "(= x y)"


def test_boolean_value_atom():
    f = parse("(= ([ (P x) ]) 1)", SIG, XY)
    assert isinstance(f, Eq) and isinstance(f.left, BVal) and f.right == BConst(1)


def test_boolean_value_render():
    t = BVal(Eq(Var("x", "S"), Var("y", "S")))
    assert render(Eq(t, BConst(1))) == "(= ([ (= x y) ]) 1)"


def test_round_trip_quantified():
    text = "(exists (u B) (and (AT 2 u) (<= u v)))"
    f = parse(text, SIG, XY)
    assert isinstance(f, Exists) and f.var == Var("u", B)
    assert alpha_equivalent(parse(render(f), SIG, XY), f)
    assert render(f) == text


def test_round_trip_alpha():
    f = parse("(forall (y S) (exists (w B) (<= w ([ (R x y) ]))))", SIG, XY)
    g = parse("(forall (q S) (exists (k B) (<= k ([ (R x q) ]))))", SIG, XY)
    assert alpha_equivalent(f, g)
    assert not alpha_equivalent(f, parse("(forall (y S) (exists (w B) (<= w ([ (R y x) ]))))",
                                         SIG, XY))


def test_syntax_error_has_position():
    with pytest.raises(FormulaError) as e:
        parse("(and (= x y)\n (P x)", SIG, XY)
    assert e.value.kind == "syntax"
    assert "2:" in str(e.value) or "1:" in str(e.value)


def test_unknown_symbol_named():
    with pytest.raises(FormulaError) as e:
        parse("(Q x)", SIG, XY)
    assert e.value.kind == "unknown" and "Q" in str(e.value)


def test_sort_mismatch_named():
    with pytest.raises(FormulaError) as e:
        parse("(= x v)", SIG, XY)
    assert e.value.kind == "sort"


def test_at_and_j_need_boolean_sort():
    with pytest.raises(FormulaError):
        parse("(AT 1 x)", SIG, XY)
    with pytest.raises(FormulaError):
        parse("(J x)", SIG, XY)
    parse("(AT 1 (bar v))", SIG, XY)


def test_reserved_sorts_rejected():
    with pytest.raises(Exception):
        Signature(("B",))
    with pytest.raises(Exception):
        parse_signature("(signature (sorts S Bbar))")


def test_signature_file():
    sig = parse_signature("(signature (sorts S T) (relations (E S T)) (functions (g (S) T))"
                          " (constants (c S)))")
    assert sig.sorts == ("S", "T")
    assert sig.relations["E"] == ("S", "T")
    assert sig.functions["g"] == (("S",), "T")


def test_formula_file_with_free_declaration():
    f, free = parse_formula_file("(formula (free (x S) (u B)) (<= u ([ (P x) ])))", SIG)
    assert free == {"x": "S", "u": B}
    assert render_formula_file(f, free).startswith("(formula (free (x S) (u B))")


def test_substitute_simple():
    f = parse("(= x z)", SIG, XY)
    assert substitute(f, {"x": Var("y", "S")}) == parse("(= y z)", SIG, XY)


def test_substitute_empty_binding():
    f = parse("(exists (y S) (R x y))", SIG, XY)
    assert substitute(f, {}) == f


def test_substitute_avoids_capture():
    f = parse("(exists (y S) (R x y))", SIG, XY)
    g = substitute(f, {"x": Var("y", "S")})
    assert "y" in free_vars(g)
    s = FiniteStructure(SIG, {"S": ("a", "b")}, relations={"R": {("a", "b")}},
                        functions={"f": {("a",): "a", ("b",): "b"}}, constants={"c": "a"})
    ev = Evaluator(s)
    # the captured reading would be exists y R(y, y), false in s
    for y in ("a", "b"):
        assert ev.truth(g, {"y": y}) == ev.truth(f, {"x": y})
    assert ev.truth(g, {"y": "a"})


def test_sort_checking_rejects_bad_ast():
    from fvkit.logic import check
    with pytest.raises(SortError):
        check(Eq(Var("x", "S"), Var("u", B)), SIG)
