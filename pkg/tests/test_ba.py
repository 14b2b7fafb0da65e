import itertools

import pytest

from fvkit.ba import (
    ABA, BAError, INF, Theory, Verdict, check_abai, decide, ep_witness_search, eval_powerset,
    parse_theory, qe, stabilization_point,
)
from fvkit.curated import ABA_SENTENCES
from fvkit.epset import EPSet
from fvkit.logic import B, Signature, Var, free_vars, is_quantifier_free
from fvkit.syntax import parse, render

from oracle import holds

NOSIG = Signature(())


def ba(text, *names):
    return parse(text, NOSIG, {n: "B" for n in names})


def masks(n, k):
    return itertools.product(range(1 << n), repeat=k)


def equivalent_on_powersets(f, g, names, max_n=5):
    for n in range(1, max_n + 1):
        for vals in masks(n, len(names)):
            env = dict(zip(names, vals))
            if holds(f, n, env) != holds(g, n, env):
                return False
    return True


# ---------------------------------------------------------------- oracle

def test_oracle_agrees_with_evaluator_on_curated_list():
    for text in ABA_SENTENCES:
        f = ba(text)
        for n in range(1, 5):
            assert eval_powerset(n, f) == holds(f, n), (text, n)


def test_powerset_example():
    f = ba("(forall (u B) (implies (AT 1 u) (exists (v B) (and (AT 1 v) (not (= v u))))))")
    assert eval_powerset(2, f)
    assert not eval_powerset(1, f)


def test_powerset_cap_and_ideal_rejected():
    with pytest.raises(BAError):
        eval_powerset(7, ba("(AT 1 1)"))
    with pytest.raises(BAError):
        eval_powerset(2, ba("(exists (v B) (J v))"))


# ---------------------------------------------------------------- qe

def test_qe_atom_below():
    f = ba("(exists (u B) (and (AT 1 u) (<= u v)))", "v")
    g = qe(f)
    assert is_quantifier_free(g)
    assert render(g) == "(not (= v 0))"
    assert equivalent_on_powersets(f, g, ["v"])


def test_qe_proper_part():
    f = ba("(exists (u B) (and (<= u v) (not (= u 0)) (not (= u v))))", "v")
    g = qe(f)
    assert render(g) == "(and (not (= v 0)) (not (AT 1 v)))"
    assert equivalent_on_powersets(f, g, ["v"])


def test_qe_identity_on_quantifier_free():
    f = ba("(and (<= u v) (AT 2 (join u v)))", "u", "v")
    assert qe(f) is f


def test_qe_keeps_free_variables():
    f = ba("(exists (w B) (and (<= w u) (<= w v) (AT 2 w)))", "u", "v")
    g = qe(f)
    assert set(free_vars(g)) <= {"u", "v"}
    assert equivalent_on_powersets(f, g, ["u", "v"], max_n=4)


def test_qe_rejects_base_sorts():
    sig = Signature(("S",))
    f = parse("(exists (y S) (= x y))", sig, {"x": "S"})
    with pytest.raises(BAError):
        qe(f)


# ---------------------------------------------------------------- decide

AT3 = ba("(AT 3 1)")


def test_decide_at3_of_one():
    assert decide("ABA:inf", AT3) == "FALSE"
    assert decide("ABA:3", AT3) == "TRUE"
    assert decide("ABA:4", AT3) == "FALSE"
    d = decide("ABA", AT3)
    assert d.verdict is Verdict.INDEPENDENT
    assert str(d) == "INDEPENDENT (true: ABA:3; false: ABA:4, ABA:inf)"


@pytest.mark.parametrize("k", range(7))
def test_decide_infinite_atoms(k):
    assert decide("ABA:inf", ba(f"(AT {k} 1)")) == "FALSE"


def test_decide_abai_examples():
    split = ba("(exists (x B) (and (not (J x)) (not (J (compl x)))))")
    assert decide("ABAI:inf", split) == "TRUE"
    pair = ba("(exists (x B) (and (J x) (not (AT 1 x)) (not (= x 0))))")
    assert decide("ABAI:inf", pair) == "TRUE"


def test_decide_atomless():
    f = ba("(exists (x B) (AT 1 x))")
    assert decide("ATOMLESS", f) == "FALSE"
    assert decide("ABA:inf", f) == "TRUE"


@pytest.mark.parametrize("text", ABA_SENTENCES)
def test_decide_matches_oracle(text):
    f = ba(text)
    for n in range(1, 7):
        assert (decide(Theory(ABA, n), f) == "TRUE") == holds(f, n), n


def test_decide_with_constants():
    f = ba("(exists (u B) (and (AT 1 u) (<= u p)))", "p")
    assert decide("ABA:3", f, {"p": 0b010}) == "TRUE"
    assert decide("ABA:3", f, {"p": 0}) == "FALSE"
    assert decide("ABA", f, {"p": None}).verdict is Verdict.INDEPENDENT
    with pytest.raises(BAError):
        decide("ABA:3", f, {"p": 0b1000})


def test_decide_errors():
    with pytest.raises(BAError):
        decide("ABA:inf", ba("(AT 1 v)", "v"))
    with pytest.raises(BAError):
        decide("ABAI", ba("(J 0)"))
    with pytest.raises(BAError):
        parse_theory("BOOL:3")


def test_theory_names():
    assert str(parse_theory("ABA:inf")) == "ABA:inf"
    assert parse_theory("ABA:5").size == 5
    assert parse_theory("ABAI:inf").size == INF


def test_stabilization():
    assert stabilization_point(AT3) == (4, False)
    n0, truth = stabilization_point(ba("(exists (u B) (AT 2 u))"))
    assert truth
    assert all(holds(ba("(exists (u B) (AT 2 u))"), n) for n in range(n0, 7))


# ---------------------------------------------------------------- witnesses

def test_witness_single_atom():
    w = ep_witness_search(ba("(exists (x B) (and (not (= x 0)) (J x)))"))
    assert w == {"x": EPSet.finite([0])}


def test_witness_evens():
    w = ep_witness_search(ba("(exists (x B) (and (not (J x)) (not (J (compl x)))))"))
    assert w == {"x": EPSet.residue(2)}


def test_witness_residue_split():
    f = ba("(exists (x B) (and (<= x p) (not (J x)) (not (J (meet p (compl x))))))", "p")
    w = ep_witness_search(f, {"p": EPSet.residue(2)})
    assert w == {"x": EPSet.residue(4)}


def test_witness_not_found_is_none():
    assert ep_witness_search(ba("(exists (x B) (and (J x) (not (J x))))")) is None


def test_check_abai_flags_nothing_on_true_sentence():
    c = check_abai(ba("(exists (x B) (and (not (J x)) (not (J (compl x)))))"))
    assert c.decision == "TRUE"
    assert not c.flagged
