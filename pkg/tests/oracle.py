"""A deliberately naive truth definition for Boolean-algebra formulas in P(n).

It shares no code with the evaluator: it walks the AST directly and
enumerates all subsets for every quantifier.
"""

from fvkit.logic import (
    And, At, BConst, Bottom, Compl, Eq, Exists, Forall, Implies, Join, Le, Meet, Not, Or,
    Top, Var,
)


def term(t, n, env):
    full = (1 << n) - 1
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, BConst):
        return full if t.value else 0
    if isinstance(t, Meet):
        return term(t.left, n, env) & term(t.right, n, env)
    if isinstance(t, Join):
        return term(t.left, n, env) | term(t.right, n, env)
    if isinstance(t, Compl):
        return full & ~term(t.arg, n, env)
    raise TypeError(t)


def holds(f, n, env=None):
    env = dict(env or {})
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Eq):
        return term(f.left, n, env) == term(f.right, n, env)
    if isinstance(f, Le):
        a, b = term(f.left, n, env), term(f.right, n, env)
        return a & ~b == 0
    if isinstance(f, At):
        return bin(term(f.term, n, env)).count("1") == f.n
    if isinstance(f, Not):
        return not holds(f.arg, n, env)
    if isinstance(f, And):
        return holds(f.left, n, env) and holds(f.right, n, env)
    if isinstance(f, Or):
        return holds(f.left, n, env) or holds(f.right, n, env)
    if isinstance(f, Implies):
        return (not holds(f.left, n, env)) or holds(f.right, n, env)
    if isinstance(f, (Exists, Forall)):
        results = (holds(f.body, n, dict(env, **{f.var.name: m})) for m in range(1 << n))
        return any(results) if isinstance(f, Exists) else all(results)
    raise TypeError(f)
