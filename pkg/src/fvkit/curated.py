"""Hand-picked sentences for the Boolean-algebra suites."""

from __future__ import annotations

from .epset import EPSet

# pure Boolean-algebra sentences, checked against P(n)
ABA_SENTENCES = [
    "(AT 3 1)",
    "(exists (u B) (AT 1 u))",
    "(forall (u B) (implies (AT 1 u) (exists (v B) (and (AT 1 v) (not (= v u))))))",
    "(forall (u B) (or (= u 0) (exists (a B) (and (AT 1 a) (<= a u)))))",
    "(exists (u B) (and (AT 2 u) (AT 2 (compl u))))",
    "(forall (u B) (exists (v B) (and (<= v u) (AT 1 v))))",
    "(exists (u B) (and (not (= u 0)) (not (= u 1))))",
    "(forall (u B) (forall (v B) (= (meet u v) (meet v u))))",
    "(exists (u B) (= u (compl u)))",
    "(forall (u B) (or (AT 0 u) (or (AT 1 u) (AT 2 u))))",
    "(exists (u B) (and (AT 1 u) (AT 1 (compl u))))",
    "(not (AT 1 1))",
    "(exists (u B) (exists (v B) (and (AT 1 u) (AT 1 v) (not (= u v)) (AT 1 (compl (join u v))))))",
    "(forall (u B) (implies (not (= u 0)) (exists (v B) (and (<= v u) (not (= v 0)) (not (= v u))))))",
    "(exists (u B) (AT 5 u))",
    "(forall (u B) (exists (v B) (= v (compl u))))",
    "(exists (u B) (forall (v B) (<= v u)))",
    "(exists (u B) (forall (v B) (<= u v)))",
    "(forall (u B) (implies (AT 1 u) (not (AT 1 (compl u)))))",
    "(exists (u B) (and (AT 3 u) (AT 3 (compl u))))",
    "(AT 6 1)",
    "(or (AT 1 1) (AT 2 1))",
    "(forall (u B) (exists (v B) (and (<= u v) (AT 1 (meet v (compl u))))))",
    "(forall (u B) (implies (not (= u 1)) (exists (v B) (and (<= u v) (AT 1 (meet v (compl u)))))))",
    "(exists (u B) (and (not (AT 0 u)) (not (AT 1 u)) (not (AT 2 u)) (not (AT 3 u))))",
    "(forall (u B) (or (AT 1 u) (not (AT 1 u))))",
    "(exists (u B) (and (AT 2 u) (exists (v B) (and (<= v u) (AT 1 v) (AT 1 (meet u (compl v)))))))",
    "(forall (u B) (forall (v B) (implies (and (AT 1 u) (AT 1 v)) (or (= u v) (= (meet u v) 0)))))",
    "(exists (u B) (exists (v B) (exists (w B) (and (AT 1 u) (AT 1 v) (AT 1 w) (= (meet u v) 0)"
    " (= (meet u w) 0) (= (meet v w) 0)))))",
    "(forall (u B) (exists (v B) (and (<= v u) (or (= v 0) (AT 2 v) (AT 1 u)))))",
]

# existential sentences for ABAI:inf, with eventually periodic parameters
EVENS = EPSet.residue(2)
ABAI_SENTENCES = [
    ("(exists (x B) (and (not (J x)) (not (J (compl x)))))", {}),
    ("(exists (x B) (and (J x) (not (AT 1 x)) (not (= x 0))))", {}),
    ("(exists (x B) (and (not (= x 0)) (J x)))", {}),
    ("(exists (x B) (AT 1 x))", {}),
    ("(exists (x B) (and (not (J x)) (AT 3 x)))", {}),
    ("(exists (x B) (and (J x) (J (compl x))))", {}),
    ("(exists (x B) (and (<= x p) (not (J x)) (not (J (meet p (compl x))))))", {"p": EVENS}),
    ("(exists (x B) (and (<= x p) (not (J x)) (not (J (meet p (compl x))))))",
     {"p": EPSet.finite([0, 1, 2])}),
    ("(exists (x B) (and (<= x p) (AT 2 x)))", {"p": EVENS}),
    ("(exists (x B) (and (AT 2 (meet x p)) (not (J (meet x (compl p))))))",
     {"p": EPSet.residue(3)}),
    ("(exists (x B) (and (not (J x)) (= (bar x) (bar p))))", {"p": EVENS}),
    ("(exists (x B) (and (not (= (bar x) (bar 0))) (not (= (bar x) (bar 1)))))", {}),
    ("(exists (x B) (and (AT 0 (bar x)) (not (= x 0))))", {}),
    ("(exists (x B) (AT 1 (bar x)))", {}),
    ("(exists (x B) (exists (y B) (and (not (J x)) (not (J y)) (= (meet x y) 0)"
     " (not (J (compl (join x y)))))))", {}),
    ("(exists (x B) (and (<= x p) (J x) (not (AT 0 x)) (not (AT 1 x))))",
     {"p": EPSet.finite([0, 1])}),
    ("(exists (x B) (and (J (meet x p)) (J (meet (compl x) p))))", {"p": EVENS}),
    ("(exists (x B) (and (not (J x)) (<= x p)))", {"p": EPSet.finite([5])}),
    ("(exists (x B) (exists (y B) (and (AT 1 x) (AT 1 y) (= (meet x y) 0))))", {}),
    ("(exists (x B) (= (bar x) (bar (compl x))))", {}),
]
