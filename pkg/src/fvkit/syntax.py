"""Concrete s-expression syntax for signatures and formulas.

Formula grammar::

    f ::= true | false | (not f) | (and f f ...) | (or f f ...) | (implies f f)
        | (exists (x S) f) | (forall (x S) f)
        | (= t t) | (<= t t) | (AT n t) | (J t) | (R t ...)
    t ::= x | c | 0 | 1 | (g t ...) | (meet t t) | (join t t) | (compl t)
        | (bar t) | ([ f ] t ...)

In ``([ f ] t1 ... tn)`` the terms replace the free variables of ``f`` in order
of first occurrence.  Free variables of a whole formula must be declared,
either through the ``free`` argument of :func:`parse` or with a file-level
wrapper ``(formula (free (x S) ...) f)``.
"""

from __future__ import annotations

from typing import Dict, Mapping, Optional

from . import sexp
from .logic import (
    App, At, B, BBAR, BConst, BVal, Bar, Bottom, Compl, Const, Eq, Exists, Forall,
    Formula, Implies, InJ, Join, Le, Meet, Not, Or, And, Rel, Signature, SortError,
    Term, Top, Var, free_vars, substitute,
)


class FormulaError(ValueError):
    """Parse failure.  ``kind`` is one of 'syntax', 'unknown', 'sort'."""

    def __init__(self, kind, message, node=None, position=None):
        if position is not None:
            line, col = position
        else:
            line, col = sexp.position(node) if node is not None else (0, 0)
        token = sexp.dumps(node) if node is not None else ""
        if len(token) > 40:
            token = token[:37] + "..."
        where = f" [{token}]" if token else ""
        super().__init__(f"{kind} error at {line}:{col}: {message}{where}")
        self.kind = kind
        self.line = line
        self.column = col
        self.token = token


_FORMULA_HEADS = {"and", "or", "not", "implies", "exists", "forall", "=", "<=", "AT", "J",
                  "true", "false"}
_TERM_HEADS = {"meet", "join", "compl", "bar", "["}
RESERVED = _FORMULA_HEADS | _TERM_HEADS | {"0", "1", "]"}


def _read(text):
    try:
        return sexp.read(text)
    except sexp.SexpError as e:
        raise FormulaError("syntax", e.args[0].rsplit(" (at ", 1)[0],
                           position=(e.line, e.column)) from None


def _is_symbol(x, name=None):
    return isinstance(x, sexp.Symbol) and (name is None or x == name)


# ---------------------------------------------------------------- signatures

def parse_signature(text) -> Signature:
    node = _read(text)
    if not isinstance(node, list) or not node or not _is_symbol(node[0], "signature"):
        raise FormulaError("syntax", "expected (signature ...)", node)
    sorts, rels, funs, consts = [], {}, {}, {}
    for section in node[1:]:
        if not isinstance(section, list) or not section or not _is_symbol(section[0]):
            raise FormulaError("syntax", "bad signature section", section)
        head = section[0]
        try:
            if head == "sorts":
                sorts.extend(str(s) for s in section[1:])
            elif head == "relations":
                for r in section[1:]:
                    rels[str(r[0])] = tuple(str(s) for s in r[1:])
            elif head == "functions":
                for f in section[1:]:
                    if len(f) != 3 or not isinstance(f[1], list):
                        raise FormulaError("syntax", "function must be (f (S ...) S)", f)
                    funs[str(f[0])] = (tuple(str(s) for s in f[1]), str(f[2]))
            elif head == "constants":
                for c in section[1:]:
                    if len(c) != 2:
                        raise FormulaError("syntax", "constant must be (c S)", c)
                    consts[str(c[0])] = str(c[1])
            else:
                raise FormulaError("syntax", f"unknown signature section {head}", section)
        except (TypeError, IndexError):
            raise FormulaError("syntax", "malformed signature entry", section) from None
    try:
        return Signature(tuple(sorts), rels, funs, consts)
    except ValueError as e:
        raise FormulaError("sort", str(e), node) from None


def render_signature(sig: Signature) -> str:
    parts = ["(signature", "  (sorts " + " ".join(sig.sorts) + ")"]
    if sig.relations:
        parts.append("  (relations " + " ".join(
            "(" + " ".join((r,) + args) + ")" for r, args in sig.relations.items()) + ")")
    if sig.functions:
        parts.append("  (functions " + " ".join(
            f"({f} ({' '.join(a)}) {r})" for f, (a, r) in sig.functions.items()) + ")")
    if sig.constants:
        parts.append("  (constants " + " ".join(
            f"({c} {s})" for c, s in sig.constants.items()) + ")")
    return "\n".join(parts) + ")"


# ---------------------------------------------------------------- formulas

class _Parser:
    def __init__(self, sig: Signature):
        self.sig = sig
        self.sorts = set(sig.sorts) | {B, BBAR}

    def binder(self, node):
        if not (isinstance(node, list) and len(node) == 2 and _is_symbol(node[0])
                and _is_symbol(node[1])):
            raise FormulaError("syntax", "binder must be (x S)", node)
        name, sort = str(node[0]), str(node[1])
        if name in RESERVED:
            raise FormulaError("syntax", f"{name} cannot be used as a variable", node)
        if sort not in self.sorts:
            raise FormulaError("unknown", f"unknown sort {sort}", node[1])
        return Var(name, sort)

    def formula(self, node, scope) -> Formula:
        if _is_symbol(node):
            if node == "true":
                return Top()
            if node == "false":
                return Bottom()
            if node in self.sig.relations and not self.sig.relations[node]:
                return Rel(str(node), ())
            raise FormulaError("unknown", f"{node} is not a formula", node)
        if not isinstance(node, list) or not node:
            raise FormulaError("syntax", "expected a formula", node)
        head = node[0]
        if not _is_symbol(head):
            raise FormulaError("syntax", "formula head must be a symbol", node)
        args = node[1:]
        try:
            if head in ("and", "or"):
                if len(args) < 2:
                    raise FormulaError("syntax", f"{head} needs at least two arguments", node)
                parts = [self.formula(a, scope) for a in args]
                cls = And if head == "and" else Or
                out = parts[-1]
                for p in reversed(parts[:-1]):
                    out = cls(p, out)
                return out
            if head == "not":
                self.arity(node, 1)
                return Not(self.formula(args[0], scope))
            if head == "implies":
                self.arity(node, 2)
                return Implies(self.formula(args[0], scope), self.formula(args[1], scope))
            if head in ("exists", "forall"):
                self.arity(node, 2)
                v = self.binder(args[0])
                inner = dict(scope)
                inner[v.name] = v
                cls = Exists if head == "exists" else Forall
                return cls(v, self.formula(args[1], inner))
            if head == "=":
                self.arity(node, 2)
                return Eq(self.term(args[0], scope), self.term(args[1], scope))
            if head == "<=":
                self.arity(node, 2)
                return Le(self.term(args[0], scope), self.term(args[1], scope))
            if head == "AT":
                self.arity(node, 2)
                if not _is_symbol(args[0]) or not args[0].isdigit():
                    raise FormulaError("syntax", "AT index must be a natural number", args[0])
                return At(int(args[0]), self.term(args[1], scope))
            if head == "J":
                self.arity(node, 1)
                return InJ(self.term(args[0], scope))
            if head in self.sig.relations:
                decl = self.sig.relations[head]
                if len(args) != len(decl):
                    raise FormulaError("sort", f"{head} expects {len(decl)} arguments", node)
                ts = tuple(self.term(a, scope) for a in args)
                for t, s, a in zip(ts, decl, args):
                    if t.sort != s:
                        raise FormulaError("sort", f"{head} expects sort {s}, got {t.sort}", a)
                return Rel(str(head), ts)
        except SortError as e:
            raise FormulaError("sort", str(e), node) from None
        raise FormulaError("unknown", f"unknown relation or connective {head}", head)

    def arity(self, node, n):
        if len(node) - 1 != n:
            raise FormulaError("syntax", f"{node[0]} takes {n} argument(s)", node)

    def term(self, node, scope) -> Term:
        if _is_symbol(node):
            if node == "0":
                return BConst(0)
            if node == "1":
                return BConst(1)
            if node in scope:
                return scope[node]
            if node in self.sig.constants:
                return Const(str(node), self.sig.constants[node])
            raise FormulaError("unknown", f"unknown symbol {node}", node)
        if not isinstance(node, list) or not node:
            raise FormulaError("syntax", "expected a term", node)
        head = node[0]
        args = node[1:]
        try:
            if _is_symbol(head, "["):
                close = next((k for k, a in enumerate(args) if _is_symbol(a, "]")), None)
                if close != 1:
                    raise FormulaError("syntax", "expected ([ f ] t ...)", node)
                phi = self.formula(args[0], scope)
                actuals = [self.term(a, scope) for a in args[2:]]
                if actuals:
                    fv = list(free_vars(phi).values())
                    if len(actuals) > len(fv):
                        raise FormulaError("sort", "more arguments than free variables", node)
                    phi = substitute(phi, {v.name: t for v, t in zip(fv, actuals)})
                return BVal(phi)
            if not _is_symbol(head):
                raise FormulaError("syntax", "term head must be a symbol", node)
            if head in ("meet", "join"):
                self.arity(node, 2)
                cls = Meet if head == "meet" else Join
                return cls(self.term(args[0], scope), self.term(args[1], scope))
            if head == "compl":
                self.arity(node, 1)
                return Compl(self.term(args[0], scope))
            if head == "bar":
                self.arity(node, 1)
                return Bar(self.term(args[0], scope))
            if head in self.sig.functions:
                decl, res = self.sig.functions[head]
                if len(args) != len(decl):
                    raise FormulaError("sort", f"{head} expects {len(decl)} arguments", node)
                ts = tuple(self.term(a, scope) for a in args)
                for t, s, a in zip(ts, decl, args):
                    if t.sort != s:
                        raise FormulaError("sort", f"{head} expects sort {s}, got {t.sort}", a)
                return App(str(head), ts, res)
        except SortError as e:
            raise FormulaError("sort", str(e), node) from None
        raise FormulaError("unknown", f"unknown function {head}", head)


def _scope(free, sig):
    scope = {}
    for name, sort in (free or {}).items():
        if sort not in sig.sorts and sort not in (B, BBAR):
            raise FormulaError("unknown", f"unknown sort {sort} for free variable {name}")
        scope[name] = Var(name, sort)
    return scope


def parse_node(node, sig: Signature, free: Optional[Mapping[str, str]] = None) -> Formula:
    return _Parser(sig).formula(node, _scope(free, sig))


def parse(text: str, sig: Signature, free: Optional[Mapping[str, str]] = None) -> Formula:
    """Parse and sort-check a formula; ``free`` declares free variable sorts."""
    return parse_node(_read(text), sig, free)


def parse_term(text: str, sig: Signature, free: Optional[Mapping[str, str]] = None) -> Term:
    return _Parser(sig).term(_read(text), _scope(free, sig))


def parse_free_decl(node, sig) -> Dict[str, str]:
    p = _Parser(sig)
    out = {}
    for b in node[1:]:
        v = p.binder(b)
        out[v.name] = v.sort
    return out


def parse_formula_file(text: str, sig: Signature):
    """Parse ``(formula (free ...) f)`` or a bare formula; returns (formula, free)."""
    node = _read(text)
    free: Dict[str, str] = {}
    if isinstance(node, list) and node and _is_symbol(node[0], "formula"):
        body = node[1:]
        if body and isinstance(body[0], list) and body[0] and _is_symbol(body[0][0], "free"):
            free = parse_free_decl(body[0], sig)
            body = body[1:]
        if len(body) != 1:
            raise FormulaError("syntax", "expected (formula (free ...) f)", node)
        node = body[0]
    return parse_node(node, sig, free), free


# ---------------------------------------------------------------- rendering

def render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, BConst):
        return str(t.value)
    if isinstance(t, App):
        return "(" + " ".join([t.fn] + [render_term(a) for a in t.args]) + ")"
    if isinstance(t, Meet):
        return f"(meet {render_term(t.left)} {render_term(t.right)})"
    if isinstance(t, Join):
        return f"(join {render_term(t.left)} {render_term(t.right)})"
    if isinstance(t, Compl):
        return f"(compl {render_term(t.arg)})"
    if isinstance(t, Bar):
        return f"(bar {render_term(t.arg)})"
    if isinstance(t, BVal):
        return f"([ {render(t.formula)} ])"
    raise TypeError(f"not a term: {t!r}")


def render(f: Formula) -> str:
    """Canonical single-line text for a formula."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Rel):
        return "(" + " ".join([f.name] + [render_term(a) for a in f.args]) + ")"
    if isinstance(f, Eq):
        return f"(= {render_term(f.left)} {render_term(f.right)})"
    if isinstance(f, Le):
        return f"(<= {render_term(f.left)} {render_term(f.right)})"
    if isinstance(f, At):
        return f"(AT {f.n} {render_term(f.term)})"
    if isinstance(f, InJ):
        return f"(J {render_term(f.term)})"
    if isinstance(f, Not):
        return f"(not {render(f.arg)})"
    if isinstance(f, And):
        return f"(and {render(f.left)} {render(f.right)})"
    if isinstance(f, Or):
        return f"(or {render(f.left)} {render(f.right)})"
    if isinstance(f, Implies):
        return f"(implies {render(f.left)} {render(f.right)})"
    if isinstance(f, (Exists, Forall)):
        q = "exists" if isinstance(f, Exists) else "forall"
        return f"({q} ({f.var.name} {f.var.sort}) {render(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def render_free(free: Mapping[str, str]) -> str:
    return "(free " + " ".join(f"({n} {s})" for n, s in free.items()) + ")"


def render_formula_file(f: Formula, free: Optional[Mapping[str, str]] = None) -> str:
    if free is None:
        free = {n: v.sort for n, v in free_vars(f).items()}
    if not free:
        return render(f)
    return f"(formula {render_free(free)} {render(f)})"
