"""Quantifier elimination and decision procedures for Boolean algebras.

The calculus works on *states*: for variables v_1..v_m, a state assigns a
size descriptor to each of the 2^m minterm cells (cell i is the meet of v_j
or its complement according to bit j of i).  Descriptors are

* ``ABA`` mode: an exact atom count 0..cap, or ``BIG`` (more than cap);
* ``ATOMLESS`` mode: ``0`` or ``NZ``;
* ``ABAI`` mode: an exact count, ``BIG`` (large, in J) or ``BIGN`` (not in
  J, hence infinitely many atoms).

Quantifier-free formulas are evaluated directly on a state.  ``exists y``
enumerates every way of splitting each cell into a y-part and a non-y part
that some model realizes.  Truncating descriptors at the cap of the current
subformula keeps the state space finite; the cap of ``exists y g`` is
``2 cap(g) + 1``, enough for a back-and-forth argument on each cell.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .epset import EPSet
from .logic import (
    And, At, B, BBAR, BConst, BVal, Bar, Bottom, Compl, Eq, Exists, Forall, Formula,
    FreshNames, Implies, InJ, Join, Le, Meet, Not, Or, Rel, Term, Top, Var, all_var_names,
    children, conj, disj, free_vars, is_quantifier_free, neg,
)
from .evaluate import Evaluator
from .structures import PowersetAlgebra

BIG = -1     # ABA: more atoms than the cap; ABAI: large but inside J
BIGN = -2    # ABAI: outside J
NZ = -3      # ATOMLESS: nonzero

ABA, ATOMLESS, ABAI = "ABA", "ATOMLESS", "ABAI"
INF = "inf"

POWERSET_CAP = 6
QE_STATE_LIMIT = 200_000


class BAError(ValueError):
    """Input outside the Boolean-algebra language or an unusable theory."""


# ---------------------------------------------------------------- theories

@dataclass(frozen=True)
class Theory:
    kind: str
    size: object = None   # None (incomplete), an int n, or INF

    @property
    def complete(self):
        return self.kind == ATOMLESS or self.size is not None

    def __str__(self):
        if self.size is None:
            return self.kind
        return f"{self.kind}:{self.size}"


def parse_theory(text) -> Theory:
    if isinstance(text, Theory):
        return text
    kind, _, size = str(text).partition(":")
    if kind not in (ABA, ATOMLESS, ABAI):
        raise BAError(f"unknown theory {text!r}")
    if kind == ATOMLESS:
        if size:
            raise BAError("ATOMLESS takes no size")
        return Theory(ATOMLESS)
    if not size:
        return Theory(kind)
    if size == INF:
        return Theory(kind, INF)
    if not size.isdigit() or int(size) < 1:
        raise BAError(f"theory size must be a positive integer or inf, got {size!r}")
    return Theory(kind, int(size))


# ---------------------------------------------------------------- descriptors

def _trunc(mode, d, cap):
    if d >= 0 and d > cap and mode != ATOMLESS:
        return BIG
    return d


def _add(a, b, cap):
    if BIGN in (a, b):
        return BIGN
    if NZ in (a, b):
        return NZ
    if BIG in (a, b):
        return BIG
    s = a + b
    return BIG if s > cap else s


def _domain(mode, cap):
    if mode == ATOMLESS:
        return (0, NZ)
    if mode == ABA:
        return tuple(range(cap + 1)) + (BIG,)
    return tuple(range(cap + 1)) + (BIG, BIGN)


def _splits(mode, d, cap):
    """Ways to split a cell with descriptor ``d`` into (y-part, rest),
    each truncated at the inner cap ``cap``."""
    if mode == ATOMLESS:
        return [(0, 0)] if d == 0 else [(0, NZ), (NZ, 0), (NZ, NZ)]
    if d >= 0:
        return list(dict.fromkeys((_trunc(mode, k, cap), _trunc(mode, d - k, cap))
                                  for k in range(d + 1)))
    small = range(cap + 1)
    if d == BIG:
        return [(k, BIG) for k in small] + [(BIG, k) for k in small] + [(BIG, BIG)]
    return ([(k, BIGN) for k in small] + [(BIGN, k) for k in small]
            + [(BIG, BIGN), (BIGN, BIG), (BIGN, BIGN)])


def describe(mode, sizes: Sequence, cap) -> tuple:
    """Descriptors for cells of known size: ints (finite) or ``None`` (infinite)."""
    out = []
    for s in sizes:
        if mode == ATOMLESS:
            out.append(0 if s == 0 else NZ)
        elif s is None:
            out.append(BIG if mode == ABA else BIGN)
        else:
            out.append(_trunc(mode, s, cap))
    return tuple(out)


# ---------------------------------------------------------------- normalization

def _xor(a, b):
    return Join(Meet(a, Compl(b)), Meet(Compl(a), b))


class _Normalizer:
    """Rewrite into the B-only core: unique bound names, no implication,
    ``AT 0`` as ``= 0`` and (ABAI mode) Bbar atoms as J-conditions."""

    def __init__(self, mode, avoid):
        self.mode = mode
        self.fresh = FreshNames(avoid)

    def formula(self, f, env):
        if isinstance(f, (Top, Bottom)):
            return f
        if isinstance(f, Rel):
            raise BAError("base-sort atom in a Boolean-algebra formula; translate it first")
        if isinstance(f, (Eq, Le)):
            if f.left.sort not in (B, BBAR):
                raise BAError("base-sort equality in a Boolean-algebra formula; translate it first")
            a, b = self.term(f.left, env), self.term(f.right, env)
            if f.left.sort == BBAR:
                return InJ(_xor(a, b) if isinstance(f, Eq) else Meet(a, Compl(b)))
            return type(f)(a, b)
        if isinstance(f, At):
            t = self.term(f.term, env)
            if f.term.sort == BBAR:
                return InJ(t) if f.n == 0 else Bottom()
            return Eq(t, BConst(0)) if f.n == 0 else At(f.n, t)
        if isinstance(f, InJ):
            if self.mode != ABAI:
                raise BAError("J needs ABAI mode")
            return InJ(self.term(f.term, env))
        if isinstance(f, Not):
            return Not(self.formula(f.arg, env))
        if isinstance(f, Implies):
            return Or(Not(self.formula(f.left, env)), self.formula(f.right, env))
        if isinstance(f, (And, Or)):
            return type(f)(self.formula(f.left, env), self.formula(f.right, env))
        if isinstance(f, (Exists, Forall)):
            v = f.var
            if v.sort not in (B, BBAR):
                raise BAError(f"quantifier over base sort {v.sort}; translate it first")
            if v.sort == BBAR and self.mode != ABAI:
                raise BAError("Bbar needs ABAI mode")
            nv = Var(self.fresh(v.name.rstrip("0123456789") or "v"), B)
            inner = dict(env)
            inner[(v.name, v.sort)] = nv
            return type(f)(nv, self.formula(f.body, inner))
        raise BAError(f"not a Boolean-algebra formula: {f!r}")

    def term(self, t, env):
        if isinstance(t, Var):
            if t.sort not in (B, BBAR):
                raise BAError(f"base-sort variable {t.name}")
            if t.sort == BBAR and self.mode != ABAI:
                raise BAError("Bbar needs ABAI mode")
            hit = env.get((t.name, t.sort))
            if hit is not None:
                return hit
            if t.sort == BBAR:
                raise BAError(f"free Bbar variable {t.name}")
            return t
        if isinstance(t, BConst):
            return t
        if isinstance(t, (Meet, Join)):
            return type(t)(self.term(t.left, env), self.term(t.right, env))
        if isinstance(t, Compl):
            return Compl(self.term(t.arg, env))
        if isinstance(t, Bar):
            if self.mode != ABAI:
                raise BAError("bar needs ABAI mode")
            return self.term(t.arg, env)
        if isinstance(t, BVal):
            raise BAError("[ ] term in a Boolean-algebra formula; translate it first")
        raise BAError(f"base-sort term {t!r} in a Boolean-algebra formula")


def normalize(f: Formula, mode=ABA) -> Formula:
    return _Normalizer(mode, all_var_names(f)).formula(f, {})


# ---------------------------------------------------------------- the calculus

class Calculus:
    """Evaluates normalized formulas on states, with memoization."""

    def __init__(self, mode=ABA):
        self.mode = mode
        self._cap: Dict = {}
        self._fv: Dict = {}
        self._memo: Dict = {}
        self._proj: Dict = {}

    def cap(self, f) -> int:
        c = self._cap.get(f)
        if c is None:
            if isinstance(f, At):
                c = f.n
            elif isinstance(f, Not):
                c = self.cap(f.arg)
            elif isinstance(f, (And, Or)):
                c = max(self.cap(f.left), self.cap(f.right))
            elif isinstance(f, (Exists, Forall)):
                c = 2 * self.cap(f.body) + 1
            else:
                c = 0
            self._cap[f] = c
        return c

    def fv(self, f) -> Tuple[str, ...]:
        r = self._fv.get(f)
        if r is None:
            r = self._fv[f] = tuple(sorted(free_vars(f)))
        return r

    def project(self, names, state, target, cap):
        """Marginalize a state over ``names`` onto ``target`` and truncate."""
        key = (names, target)
        index = self._proj.get(key)
        if index is None:
            pos = [names.index(t) for t in target]
            index = tuple(sum(((i >> p) & 1) << k for k, p in enumerate(pos))
                          for i in range(1 << len(names)))
            self._proj[key] = index
        out = [0] * (1 << len(target))
        if self.mode == ATOMLESS:
            for i, d in enumerate(state):
                if d:
                    out[index[i]] = NZ
            return tuple(out)
        for i, d in enumerate(state):
            out[index[i]] = _add(out[index[i]], d, cap)
        return tuple(out)

    def holds(self, f, names: Tuple[str, ...], state: tuple) -> bool:
        target = self.fv(f)
        if target != names:
            state = self.project(names, state, target, self.cap(f))
        else:
            state = tuple(_trunc(self.mode, d, self.cap(f)) for d in state)
        key = (f, state)
        r = self._memo.get(key)
        if r is None:
            r = self._memo[key] = self._eval(f, target, state)
        return r

    # terms evaluate to bitsets of cells
    def _cells(self, t, names):
        if isinstance(t, Var):
            k = names.index(t.name)
            return sum(1 << i for i in range(1 << len(names)) if i >> k & 1)
        if isinstance(t, BConst):
            return (1 << (1 << len(names))) - 1 if t.value else 0
        if isinstance(t, Meet):
            return self._cells(t.left, names) & self._cells(t.right, names)
        if isinstance(t, Join):
            return self._cells(t.left, names) | self._cells(t.right, names)
        if isinstance(t, Compl):
            return ((1 << (1 << len(names))) - 1) ^ self._cells(t.arg, names)
        raise BAError(f"unexpected term {t!r}")

    def _eval(self, f, names, state):
        if isinstance(f, Top):
            return True
        if isinstance(f, Bottom):
            return False
        if isinstance(f, (Eq, Le)):
            a, b = self._cells(f.left, names), self._cells(f.right, names)
            cover = a ^ b if isinstance(f, Eq) else a & ~b
            return all(state[i] == 0 for i in range(len(state)) if cover >> i & 1)
        if isinstance(f, At):
            cover = self._cells(f.term, names)
            total = 0
            for i, d in enumerate(state):
                if cover >> i & 1:
                    if d < 0:
                        return False
                    total += d
            return total == f.n
        if isinstance(f, InJ):
            cover = self._cells(f.term, names)
            return all(state[i] != BIGN for i in range(len(state)) if cover >> i & 1)
        if isinstance(f, Not):
            return not self.holds(f.arg, names, state)
        if isinstance(f, And):
            return self.holds(f.left, names, state) and self.holds(f.right, names, state)
        if isinstance(f, Or):
            return self.holds(f.left, names, state) or self.holds(f.right, names, state)
        if isinstance(f, (Exists, Forall)):
            y = f.var.name
            if y not in free_vars(f.body):
                return self.holds(f.body, names, state)
            want = isinstance(f, Exists)
            inner = names + (y,)
            cap = self.cap(f.body)
            m = len(names)
            options = [_splits(self.mode, d, cap) for d in state]
            for choice in itertools.product(*options):
                child = [0] * (2 << m)
                for i, (yes, no) in enumerate(choice):
                    child[i | (1 << m)] = yes
                    child[i] = no
                if self.holds(f.body, inner, tuple(child)) == want:
                    return want
            return not want
        raise BAError(f"unexpected formula {f!r}")


# ---------------------------------------------------------------- states of theories

def _compositions(n, parts):
    if parts == 1:
        yield (n,)
        return
    for k in range(n + 1):
        for rest in _compositions(n - k, parts - 1):
            yield (k,) + rest


def theory_states(theory: Theory, m: int, cap: int):
    """Every state over m variables realized in some model of ``theory``."""
    cells = 1 << m
    mode = theory.kind
    if isinstance(theory.size, int):
        seen = set()
        for comp in _compositions(theory.size, cells):
            st = tuple(_trunc(mode, k, cap) for k in comp)
            if st not in seen:
                seen.add(st)
                yield st
        return
    dom = _domain(mode, cap)
    required = {ATOMLESS: NZ, ABAI: BIGN, ABA: BIG}[mode] if theory.size == INF or \
        mode == ATOMLESS else None
    for st in itertools.product(dom, repeat=cells):
        if required is None:
            if any(d != 0 for d in st):
                yield st
        elif required in st:
            yield st


def top_state(theory: Theory, cap: int) -> tuple:
    if theory.kind == ATOMLESS:
        return (NZ,)
    if theory.size == INF:
        return (BIG,) if theory.kind == ABA else (BIGN,)
    return (_trunc(theory.kind, theory.size, cap),)


# ---------------------------------------------------------------- qe

def _minterm(names, i) -> Term:
    parts = [Var(n, B) if i >> j & 1 else Compl(Var(n, B)) for j, n in enumerate(names)]
    if not parts:
        return BConst(1)
    t = parts[0]
    for p in parts[1:]:
        t = Meet(t, p)
    return t


def _cell_condition(mode, t, allowed, cap):
    dom = _domain(mode, cap)
    allowed = set(allowed)
    if allowed >= set(dom):
        return Top()
    if mode == ATOMLESS:
        return Eq(t, BConst(0)) if allowed == {0} else Not(Eq(t, BConst(0)))

    def exact(k):
        return Eq(t, BConst(0)) if k == 0 else At(k, t)
    finite = [k for k in dom if k >= 0]
    missing = [k for k in finite if k not in allowed]
    present = [k for k in finite if k in allowed]
    big = {d for d in allowed if d < 0}
    if not big:
        return disj(*(exact(k) for k in present))
    if mode == ABA or big == {BIG, BIGN}:
        return conj(*(neg(exact(k)) for k in missing))
    if big == {BIGN}:
        return disj(Not(InJ(t)), *(exact(k) for k in present))
    # only BIGJ among the large descriptors
    return conj(InJ(t), *(neg(exact(k)) for k in missing))


def _merge_boxes(boxes, cells):
    """Repeatedly union boxes that agree outside a single cell."""
    boxes = [tuple(frozenset(s) for s in b) for b in boxes]
    changed = True
    while changed:
        changed = False
        for c in range(cells):
            groups: Dict[tuple, set] = {}
            order = []
            for b in boxes:
                key = b[:c] + b[c + 1:]
                if key not in groups:
                    groups[key] = set()
                    order.append(key)
                groups[key] |= b[c]
            if len(order) < len(boxes):
                changed = True
            boxes = [k[:c] + (frozenset(groups[k]),) + k[c:] for k in order]
    return boxes


def qe(f: Formula, theory="ABA") -> Formula:
    """A quantifier-free formula equivalent to ``f`` in every model of ``theory``."""
    th = parse_theory(theory)
    mode = th.kind
    g = normalize(f, mode)
    if is_quantifier_free(f):
        return f
    for name, v in free_vars(f).items():
        if v.sort == BBAR:
            raise BAError(f"free Bbar variable {name} in qe")
    names = tuple(sorted(free_vars(g)))
    calc = Calculus(mode)
    cap = calc.cap(g)
    dom = _domain(mode, cap)
    if len(dom) ** (1 << len(names)) > QE_STATE_LIMIT:
        raise BAError("too many free variables for quantifier elimination")
    true_states = [st for st in theory_states(th, len(names), cap) if calc.holds(g, names, st)]
    cells = 1 << len(names)
    boxes = _merge_boxes([tuple({d} for d in st) for st in true_states], cells)
    out = []
    for b in boxes:
        out.append(conj(*(_cell_condition(mode, _minterm(names, i), b[i], cap)
                          for i in range(cells))))
    return disj(*out)


# ---------------------------------------------------------------- decide

class Verdict(Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    INDEPENDENT = "INDEPENDENT"

    def __str__(self):
        return self.value


@dataclass
class Decision:
    verdict: Verdict
    true_in: List[str] = field(default_factory=list)
    false_in: List[str] = field(default_factory=list)
    truths: Dict[object, bool] = field(default_factory=dict)

    def __str__(self):
        if self.verdict is not Verdict.INDEPENDENT:
            return str(self.verdict)
        return (f"INDEPENDENT (true: {', '.join(self.true_in)}; "
                f"false: {', '.join(self.false_in)})")

    def __eq__(self, other):
        if isinstance(other, (str, Verdict)):
            return str(self.verdict) == str(other)
        return NotImplemented


def _constant_state(th: Theory, names, constants, cap):
    cells = 1 << len(names)
    mode = th.kind
    if isinstance(th.size, int):
        vals = []
        for n in names:
            v = constants[n]
            if not isinstance(v, int) or v < 0 or v >> th.size:
                raise BAError(f"constant {n} must be a subset mask of P({th.size})")
            vals.append(v)
        full = (1 << th.size) - 1
        sizes = []
        for i in range(cells):
            m = full
            for j, v in enumerate(vals):
                m &= v if i >> j & 1 else full ^ v
            sizes.append(bin(m).count("1"))
        return describe(mode, sizes, cap)
    vals = []
    for n in names:
        v = constants[n]
        if isinstance(v, int):
            v = EPSet.finite(i for i in range(v.bit_length()) if v >> i & 1)
        if not isinstance(v, EPSet):
            raise BAError(f"constant {n} must be an eventually periodic set")
        vals.append(v)
    sizes = []
    for i in range(cells):
        c = EPSet.full()
        for j, v in enumerate(vals):
            c = c & (v if i >> j & 1 else ~v)
        if mode == ATOMLESS:
            sizes.append(0 if c.is_finite() else None)
        else:
            sizes.append(c.count())
    return describe(mode, sizes, cap)


def _truth_in(th, g, names, constants, calc, cap):
    """TRUE/FALSE/INDEPENDENT of g in the complete theory ``th``."""
    if names and all(constants[n] is not None for n in names):
        return Verdict.TRUE if calc.holds(g, names, _constant_state(th, names, constants, cap)) \
            else Verdict.FALSE
    if not names:
        return Verdict.TRUE if calc.holds(g, (), top_state(th, cap)) else Verdict.FALSE
    if any(constants[n] is not None for n in names):
        raise BAError("constants must be all concrete or all symbolic")
    seen = {calc.holds(g, names, st) for st in theory_states(th, len(names), cap)}
    if seen == {True}:
        return Verdict.TRUE
    if seen == {False}:
        return Verdict.FALSE
    return Verdict.INDEPENDENT


def decide(theory, sentence: Formula, constants: Optional[Mapping[str, object]] = None) -> Decision:
    """Decide a sentence (free variables act as named constants) in a theory.

    ``constants`` maps each free variable to a value (a subset mask for the
    finite theories, an ``EPSet`` for the infinite ones) or to ``None``
    (symbolic: TRUE/FALSE only if the answer holds for every value).
    """
    th = parse_theory(theory)
    mode = th.kind
    constants = dict(constants or {})
    fv = free_vars(sentence)
    for name in constants:
        if name not in fv:
            raise BAError(f"unknown constant {name}")
    for name, v in fv.items():
        if name not in constants:
            raise BAError(f"free variable {name} remains; give it a value or mark it symbolic")
        if v.sort != B:
            raise BAError(f"constant {name} must have sort B")
    g = normalize(sentence, mode)
    names = tuple(sorted(free_vars(g)))
    calc = Calculus(mode)
    cap = calc.cap(g)
    if th.complete:
        return Decision(_truth_in(th, g, names, constants, calc, cap))
    if mode == ABAI:
        raise BAError("ABAI is incomplete; use ABAI:inf or ABAI:n")
    if any(constants[n] is not None for n in names):
        raise BAError("ABA has no fixed size; constants must be symbolic")
    horizon = (cap + 1) * (1 << len(names))
    sizes = list(range(1, horizon + 1)) + [INF]
    truths = {n: _truth_in(Theory(ABA, n), g, names, constants, calc, cap) for n in sizes}
    values = set(truths.values())
    if len(values) == 1:
        return Decision(values.pop(), truths={n: v is Verdict.TRUE for n, v in truths.items()})
    label = lambda n: f"ABA:{n}"
    if Verdict.INDEPENDENT in values:
        true_in = [label(n) for n, v in truths.items() if v is not Verdict.FALSE][:1]
        false_in = [label(n) for n, v in truths.items() if v is not Verdict.TRUE][:1]
        return Decision(Verdict.INDEPENDENT, true_in, false_in)
    stable = truths[INF]
    t_star = horizon + 1
    for n in reversed(sizes[:-1]):
        if truths[n] != stable:
            break
        t_star = n
    stable_side = [label(t_star), label(INF)] if t_star <= horizon else [label(INF)]
    other_side = [label(t_star - 1)]
    if stable is Verdict.TRUE:
        true_in, false_in = stable_side, other_side
    else:
        true_in, false_in = other_side, stable_side
    return Decision(Verdict.INDEPENDENT, true_in, false_in,
                    truths={n: v is Verdict.TRUE for n, v in truths.items()})


def stabilization_point(sentence: Formula, limit: Optional[int] = None) -> Tuple[int, bool]:
    """Least n0 with truth in P(n) constant for all n >= n0, and that truth."""
    g = normalize(sentence, ABA)
    if free_vars(g):
        raise BAError("stabilization is defined for sentences")
    calc = Calculus(ABA)
    cap = calc.cap(g)
    stable = calc.holds(g, (), (BIG,))
    n0 = cap + 1
    for n in range(cap, 0, -1):
        if calc.holds(g, (), (n,)) != stable:
            break
        n0 = n
    return n0, stable


# ---------------------------------------------------------------- powerset oracle

def _reject_ideal(f):
    stack = [f]
    while stack:
        y = stack.pop()
        if isinstance(y, (InJ, Bar)):
            raise BAError("J and bar have no meaning in P(n); use a reduced product instead")
        if isinstance(y, Var) and y.sort == BBAR:
            raise BAError("Bbar has no meaning in P(n)")
        if isinstance(y, (Exists, Forall)):
            stack.append(y.var)
        stack.extend(children(y))


def eval_powerset(n: int, f: Formula, asg: Optional[Mapping] = None, cap=POWERSET_CAP) -> bool:
    """Brute-force truth of ``f`` in P(n) (B values are subset masks)."""
    if n > cap:
        raise BAError(f"P({n}) exceeds the powerset cap {cap}")
    _reject_ideal(f)
    return Evaluator(PowersetAlgebra(n)).truth(f, asg or {})


# ---------------------------------------------------------------- EPSet reference model

def ep_value(t: Term, env: Mapping[str, EPSet]) -> EPSet:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, BConst):
        return EPSet.full() if t.value else EPSet.empty()
    if isinstance(t, Meet):
        return ep_value(t.left, env) & ep_value(t.right, env)
    if isinstance(t, Join):
        return ep_value(t.left, env) | ep_value(t.right, env)
    if isinstance(t, Compl):
        return ~ep_value(t.arg, env)
    raise BAError(f"cannot evaluate {t!r} on eventually periodic sets")


def ep_truth(f: Formula, env: Mapping[str, EPSet]) -> bool:
    """Exact truth of a normalized quantifier-free formula, with J = finite sets."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Eq):
        return ep_value(f.left, env) == ep_value(f.right, env)
    if isinstance(f, Le):
        return ep_value(f.left, env) <= ep_value(f.right, env)
    if isinstance(f, At):
        return ep_value(f.term, env).count() == f.n
    if isinstance(f, InJ):
        return ep_value(f.term, env).is_finite()
    if isinstance(f, Not):
        return not ep_truth(f.arg, env)
    if isinstance(f, And):
        return ep_truth(f.left, env) and ep_truth(f.right, env)
    if isinstance(f, Or):
        return ep_truth(f.left, env) or ep_truth(f.right, env)
    raise BAError("witness search needs a quantifier-free matrix")


def _ep_cells(values: Sequence[EPSet]) -> List[EPSet]:
    cells = [EPSet.full()]
    for v in values:
        cells = [piece for c in cells for piece in (c & v, c - v)]
    return [c for c in cells if not c.is_empty()]


def _ep_options(c: EPSet, budget: int) -> List[EPSet]:
    opts = [EPSet.empty(), c]
    for j in range(1, budget + 1):
        opts.append(c.take(j))
    for j in range(1, budget + 1):
        opts.append(c - c.take(j))
    for q in range(2, budget + 1):
        piece = c.every(q)
        opts.extend([piece, c - piece])
    return list(dict.fromkeys(opts))


DEFAULT_BUDGET = 3
SEARCH_LIMIT = 200_000


def ep_witness_search(f: Formula, params: Optional[Mapping[str, EPSet]] = None,
                      budget: int = DEFAULT_BUDGET, limit: int = SEARCH_LIMIT):
    """Look for EPSet witnesses of an existential formula.

    Candidates for each variable are unions, over the minterm cells of the
    parameters and earlier witnesses, of per-cell pieces: nothing, the whole
    cell, its first j elements or all but those, and every q-th element or
    the rest (j, q up to ``budget``).  Returns a dict of witnesses, or
    ``None`` when nothing is found (which does not refute the formula).
    """
    params = dict(params or {})
    xs = []
    g = f
    while isinstance(g, Exists):
        xs.append(g.var)
        g = g.body
    if not is_quantifier_free(g):
        raise BAError("witness search needs an existential prefix over a quantifier-free matrix")
    for name, v in params.items():
        if not isinstance(v, EPSet):
            raise BAError(f"parameter {name} is not an eventually periodic set")
    norm = _Normalizer(ABAI, all_var_names(f) | set(params))
    env_names: Dict[tuple, Var] = {}
    internal: Dict[str, EPSet] = {}
    for name, v in free_vars(g).items():
        if name in {x.name for x in xs}:
            continue
        if name not in params:
            raise BAError(f"no value for parameter {name}")
        if v.sort == BBAR:
            rep = Var(norm.fresh(name), B)
            env_names[(name, BBAR)] = rep
            internal[rep.name] = params[name]
        else:
            internal[name] = params[name]
    order = []
    for x in xs:
        rep = Var(norm.fresh(x.name), B)
        env_names[(x.name, x.sort)] = rep
        order.append(rep.name)
    matrix = norm.formula(g, env_names)

    steps = [0]
    env = dict(internal)
    base = list(internal.values())

    def rec(k, chosen):
        if k == len(order):
            steps[0] += 1
            return ep_truth(matrix, env)
        cells = _ep_cells(base + chosen)
        per_cell = [_ep_options(c, budget) for c in cells]
        seen = set()
        for combo in itertools.product(*per_cell):
            if steps[0] >= limit:
                return False
            cand = EPSet.empty()
            for piece in combo:
                cand = cand | piece
            if cand in seen:
                continue
            seen.add(cand)
            env[order[k]] = cand
            if rec(k + 1, chosen + [cand]):
                return True
        return False

    if not rec(0, []):
        return None
    return {x.name: env[rep] for x, rep in zip(xs, order)}


@dataclass
class ABAICheck:
    decision: Decision
    witness: Optional[Dict[str, EPSet]]

    @property
    def flagged(self) -> bool:
        found = self.witness is not None
        return (self.decision.verdict is Verdict.TRUE) != found


def check_abai(sentence: Formula, params: Optional[Mapping[str, EPSet]] = None,
               budget: int = DEFAULT_BUDGET) -> ABAICheck:
    """Compare decide(ABAI:inf) with the witness search on the EPSet model."""
    params = dict(params or {})
    d = decide(Theory(ABAI, INF), sentence, params)
    return ABAICheck(d, ep_witness_search(sentence, params, budget))
