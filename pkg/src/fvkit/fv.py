"""Feferman-Vaught translation of L^boole formulas into the normal form
``beta([phi_1(x)], ..., [phi_k(x)], u)``.

A normal form keeps the base-language cells ``phi_1..phi_k`` separately from
the Boolean-sort formula ``beta``; inside ``beta`` the value of cell k is the
B-sort variable ``@k`` (a *slot*).  The translator works bottom-up:

* atoms of base sort become a single slot asserted equal to 1;
* Boolean-sort atoms have each ``[phi]`` replaced by a slot;
* negation complements ``beta``; conjunction and disjunction merge cells;
* a base-sort ``exists x`` first refines the cells that mention ``x`` into a
  propositional partition, then replaces each cell by ``exists x cell`` and
  ``beta`` by the Part construction over fresh B-sort variables.

Quantifiers over B and Bbar stay inside ``beta``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from . import sexp
from .logic import (
    And, At, B, BBAR, BConst, BVal, Bar, Bottom, Compl, Eq, Exists, Forall, Formula,
    FreshNames, Implies, InJ, Join, Le, Meet, Not, Or, Rel, Signature, Term, Top, Var,
    all_var_names, canonical, conj, free_vars, join_all, neg, substitute,
)
from .syntax import FormulaError, parse_free_decl, parse_node, render, render_free

SLOT_PREFIX = "@"


class TranslateError(ValueError):
    """Input outside the translatable fragment."""


@lru_cache(maxsize=None)
def slot(k: int) -> Var:
    """The B-sort placeholder for cell ``k`` (0-based)."""
    return Var(f"{SLOT_PREFIX}{k + 1}", B)


def slot_index(name: str) -> Optional[int]:
    if name.startswith(SLOT_PREFIX) and name[1:].isdigit():
        return int(name[1:]) - 1
    return None


@dataclass(frozen=True)
class FVNormalForm:
    cells: Tuple[Formula, ...]
    boolean_part: Formula

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        for name in free_vars(self.boolean_part):
            k = slot_index(name)
            if k is not None and k >= len(self.cells):
                raise TranslateError(f"slot {name} has no cell")

    @property
    def k(self):
        return len(self.cells)

    def slots(self):
        return [slot(k) for k in range(self.k)]

    def embed(self) -> Formula:
        """The equivalent L^boole formula with every slot replaced by [cell]."""
        return substitute(self.boolean_part,
                          {slot(k).name: BVal(c) for k, c in enumerate(self.cells)})

    def base_free_vars(self) -> Dict[str, Var]:
        out: Dict[str, Var] = {}
        for c in self.cells:
            for n, v in free_vars(c).items():
                out.setdefault(n, v)
        return out

    def boolean_free_vars(self) -> Dict[str, Var]:
        return {n: v for n, v in free_vars(self.boolean_part).items() if slot_index(n) is None}


# ---------------------------------------------------------------- propositional layer

def _prop_atoms(f, out):
    """Maximal non-connective subformulas, keyed by alpha-canonical form."""
    if isinstance(f, (Not,)):
        _prop_atoms(f.arg, out)
    elif isinstance(f, (And, Or, Implies)):
        _prop_atoms(f.left, out)
        _prop_atoms(f.right, out)
    elif not isinstance(f, (Top, Bottom)):
        out.setdefault(canonical(f), None)


def _prop_eval(f, val):
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Not):
        return not _prop_eval(f.arg, val)
    if isinstance(f, And):
        return _prop_eval(f.left, val) and _prop_eval(f.right, val)
    if isinstance(f, Or):
        return _prop_eval(f.left, val) or _prop_eval(f.right, val)
    if isinstance(f, Implies):
        return (not _prop_eval(f.left, val)) or _prop_eval(f.right, val)
    return val[canonical(f)]


MAX_PROP_ATOMS = 14


def realizable_sign_vectors(formulas: Sequence[Formula]):
    """Sign vectors (tuples of bools) achievable by some truth assignment to the
    propositional atoms of ``formulas``; ``None`` if there are too many atoms."""
    atoms: Dict = {}
    for f in formulas:
        _prop_atoms(f, atoms)
    keys = list(atoms)
    if len(keys) > MAX_PROP_ATOMS:
        return None
    out = set()
    for bits in itertools.product((False, True), repeat=len(keys)):
        val = dict(zip(keys, bits))
        out.add(tuple(_prop_eval(f, val) for f in formulas))
    return out


def is_propositional_partition(cells: Sequence[Formula]) -> bool:
    """Pairwise inconsistent and jointly exhaustive, by truth table."""
    vectors = realizable_sign_vectors(cells)
    if vectors is None:
        raise TranslateError("too many propositional atoms for a truth-table check")
    return all(sum(v) == 1 for v in vectors)


def _signed(f, positive):
    return f if positive else neg(f)


# ---------------------------------------------------------------- the two constructions

def _sign_vectors(m):
    """All sign vectors of length m, all-positive first (subset order)."""
    for code in range((1 << m) - 1, -1, -1):
        yield tuple(bool(code >> (m - 1 - j) & 1) for j in range(m))


MAX_CELLS = 4096


def _partition(cells, prune=True, prune_models=None):
    """Refine ``cells`` into sign-vector cells.

    Returns the new cells and, for each old cell, the list of new cell indices
    whose sign vector has that cell positive.
    """
    m = len(cells)
    realizable = realizable_sign_vectors(cells) if prune else None
    count = len(realizable) if realizable is not None else 1 << m
    if count > MAX_CELLS:
        raise TranslateError(f"the normal form needs {count} cells (limit {MAX_CELLS})")
    if realizable is not None:
        # same all-positive-first order as _sign_vectors, without the 2^m loop
        vectors = sorted(realizable, key=lambda v: [not b for b in v])
    else:
        vectors = _sign_vectors(m)
    new_cells, members = [], [[] for _ in range(m)]
    for s in vectors:
        cell = conj(*(_signed(c, pos) for c, pos in zip(cells, s)))
        if prune_models and not _satisfiable_somewhere(cell, prune_models):
            continue
        for j, pos in enumerate(s):
            if pos:
                members[j].append(len(new_cells))
        new_cells.append(cell)
    return new_cells, members


def _satisfiable_somewhere(cell, models):
    from .evaluate import Evaluator

    fv = list(free_vars(cell).values())
    for m in models:
        ev = Evaluator(m)
        for asg in ev.assignments(fv):
            if ev.truth(cell, asg):
                return True
    return False


def to_partition_form(cells: Sequence[Formula], beta: Formula, prune=True,
                      prune_models=None) -> FVNormalForm:
    """Rewrite ``beta([cells])`` over the 2^m sign-vector cells.

    ``prune`` drops propositionally inconsistent sign vectors; ``prune_models``
    (off by default) also drops cells unsatisfiable in every given structure,
    which preserves equivalence only on products of those structures.
    """
    cells = list(cells)
    for name in free_vars(beta):
        k = slot_index(name)
        if k is not None and k >= len(cells):
            raise TranslateError(f"slot count mismatch: {name} with {len(cells)} cells")
    new_cells, members = _partition(cells, prune, prune_models)
    mapping = {slot(j).name: join_all([slot(k) for k in ks]) for j, ks in enumerate(members)}
    return FVNormalForm(tuple(new_cells), substitute(beta, mapping))


def part_formula(ws: Sequence[Term]) -> Formula:
    """``ws`` is a partition of unity: pairwise disjoint with join 1."""
    ws = list(ws)
    disjoint = [Eq(Meet(a, b), BConst(0)) for a, b in itertools.combinations(ws, 2)]
    return conj(*disjoint, Eq(join_all(ws), BConst(1)))


def _exists_block(ws, body):
    for w in reversed(ws):
        body = Exists(w, body)
    return body


def _part_elimination(beta, indices, fresh):
    """Replace the slots at ``indices`` by fresh w's under the Part block."""
    ws = [Var(fresh("w"), B) for _ in indices]
    inner = substitute(beta, {slot(k).name: w for k, w in zip(indices, ws)})
    bounds = [Le(w, slot(k)) for k, w in zip(indices, ws)]
    return _exists_block(ws, conj(part_formula(ws), *bounds, inner))


def _exists_cell(x, cell):
    return Exists(x, cell) if x.name in free_vars(cell) else cell


def eliminate_exists(body: FVNormalForm, x: Var) -> FVNormalForm:
    """``exists x`` of a normal form whose cells are a partition of unity."""
    if not any(x.name in free_vars(c) for c in body.cells):
        return body
    fresh = FreshNames(all_var_names(body.boolean_part))
    cells = tuple(_exists_cell(x, c) for c in body.cells)
    beta = _part_elimination(body.boolean_part, list(range(body.k)), fresh)
    return FVNormalForm(cells, beta)


# ---------------------------------------------------------------- translation

class _Form:
    """Intermediate (cells, beta) pair; cells are deduplicated up to alpha."""

    def __init__(self, cells=(), beta=Top()):
        self.cells = list(cells)
        self.beta = beta

    def add_cell(self, c):
        key = canonical(c)
        for k, d in enumerate(self.cells):
            if canonical(d) == key:
                return k
        self.cells.append(c)
        return len(self.cells) - 1

    def absorb(self, other: "_Form"):
        """Import other's cells; return other's beta with slots renumbered."""
        mapping = {}
        for k, c in enumerate(other.cells):
            j = self.add_cell(c)
            if j != k:
                mapping[slot(k).name] = slot(j)
        return substitute(other.beta, mapping) if mapping else other.beta


def _slotify_term(t, form):
    if isinstance(t, BVal):
        return slot(form.add_cell(t.formula))
    if isinstance(t, Meet):
        return Meet(_slotify_term(t.left, form), _slotify_term(t.right, form))
    if isinstance(t, Join):
        return Join(_slotify_term(t.left, form), _slotify_term(t.right, form))
    if isinstance(t, Compl):
        return Compl(_slotify_term(t.arg, form))
    if isinstance(t, Bar):
        return Bar(_slotify_term(t.arg, form))
    return t


def _is_boolean_atom(f):
    if isinstance(f, (Le, At, InJ)):
        return True
    return isinstance(f, Eq) and f.left.sort in (B, BBAR)


class Translator:
    def __init__(self, prune=True, prune_models=None):
        self.prune = prune
        self.prune_models = prune_models

    def translate(self, f: Formula) -> FVNormalForm:
        for name in all_var_names(f):
            if name.startswith(SLOT_PREFIX):
                raise TranslateError(f"variable name {name} is reserved for cell slots")
        form = self._form(f)
        return to_partition_form(form.cells, form.beta, self.prune, self.prune_models)

    def _form(self, f) -> _Form:
        if isinstance(f, (Top, Bottom)):
            return _Form((), f)
        if isinstance(f, Rel) or (isinstance(f, Eq) and not _is_boolean_atom(f)):
            return _Form((f,), Eq(slot(0), BConst(1)))
        if _is_boolean_atom(f):
            form = _Form()
            if isinstance(f, Eq):
                form.beta = Eq(_slotify_term(f.left, form), _slotify_term(f.right, form))
            elif isinstance(f, Le):
                form.beta = Le(_slotify_term(f.left, form), _slotify_term(f.right, form))
            elif isinstance(f, At):
                form.beta = At(f.n, _slotify_term(f.term, form))
            else:
                form.beta = InJ(_slotify_term(f.term, form))
            return form
        if isinstance(f, Not):
            inner = self._form(f.arg)
            inner.beta = neg(inner.beta)
            return inner
        if isinstance(f, Implies):
            return self._form(Or(Not(f.left), f.right))
        if isinstance(f, (And, Or)):
            left = self._form(f.left)
            right_beta = left.absorb(self._form(f.right))
            left.beta = type(f)(left.beta, right_beta)
            return left
        if isinstance(f, Forall):
            return self._form(Not(Exists(f.var, Not(f.body))))
        if isinstance(f, Exists):
            inner = self._form(f.body)
            if f.var.sort in (B, BBAR):
                inner.beta = Exists(f.var, inner.beta)
                return inner
            return self._eliminate(inner, f.var)
        raise TranslateError(f"cannot translate {f!r}")

    def _eliminate(self, form: _Form, x: Var) -> _Form:
        dep = [k for k, c in enumerate(form.cells) if x.name in free_vars(c)]
        if not dep:
            return form
        keep = [k for k in range(len(form.cells)) if k not in dep]
        part_cells, members = _partition([form.cells[k] for k in dep], self.prune,
                                         self.prune_models)
        # new slot layout: kept cells first, then the partition of the x-cells
        mapping = {slot(k).name: slot(a) for a, k in enumerate(keep)}
        offset = len(keep)
        for j, k in enumerate(dep):
            mapping[slot(k).name] = join_all([slot(offset + p) for p in members[j]])
        beta = substitute(form.beta, mapping)
        fresh = FreshNames(all_var_names(beta))
        part_slots = list(range(offset, offset + len(part_cells)))
        beta = _part_elimination(beta, part_slots, fresh)
        cells = [form.cells[k] for k in keep] + [_exists_cell(x, c) for c in part_cells]
        # alpha-equal cells collapse onto one slot
        out = _Form()
        remap = {}
        for k, c in enumerate(cells):
            j = out.add_cell(c)
            if j != k:
                remap[slot(k).name] = slot(j)
        out.beta = substitute(beta, remap) if remap else beta
        return out


def translate(f: Formula, prune=True, prune_models=None) -> FVNormalForm:
    """Compile an L^boole (or L_mixed) formula into Feferman-Vaught normal form."""
    return Translator(prune, prune_models).translate(f)


# ---------------------------------------------------------------- serialization

def render_fv(nf: FVNormalForm) -> str:
    free = {}
    for n, v in nf.base_free_vars().items():
        free[n] = v.sort
    for n, v in nf.boolean_free_vars().items():
        free[n] = v.sort
    cells = " ".join(render(c) for c in nf.cells)
    head = f"(fv {render_free(free)} " if free else "(fv "
    return f"{head}(cells{' ' + cells if cells else ''}) (bool {render(nf.boolean_part)}))"


def parse_fv(text: str, sig: Signature) -> FVNormalForm:
    try:
        node = sexp.read(text)
    except sexp.SexpError as e:
        raise FormulaError("syntax", e.args[0].rsplit(" (at ", 1)[0],
                           position=(e.line, e.column)) from None
    if not isinstance(node, list) or not node or node[0] != "fv":
        raise FormulaError("syntax", "expected (fv ...)", node)
    free: Dict[str, str] = {}
    cells_node = bool_node = None
    for item in node[1:]:
        if isinstance(item, list) and item and item[0] == "free":
            free = parse_free_decl(item, sig)
        elif isinstance(item, list) and item and item[0] == "cells":
            cells_node = item[1:]
        elif isinstance(item, list) and item and item[0] == "bool" and len(item) == 2:
            bool_node = item[1]
        else:
            raise FormulaError("syntax", "unexpected entry in (fv ...)", item)
    if cells_node is None or bool_node is None:
        raise FormulaError("syntax", "(fv ...) needs (cells ...) and (bool ...)", node)
    cells = [parse_node(c, sig, free) for c in cells_node]
    bfree = dict(free)
    bfree.update({slot(k).name: B for k in range(len(cells))})
    beta = parse_node(bool_node, sig, bfree)
    return FVNormalForm(tuple(cells), beta)


__all__ = [
    "FVNormalForm", "TranslateError", "Translator", "eliminate_exists", "is_propositional_partition",
    "parse_fv", "part_formula", "render_fv", "slot", "to_partition_form", "translate",
]
