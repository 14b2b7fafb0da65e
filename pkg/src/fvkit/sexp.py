"""Minimal s-expression reader and writer.

Atoms are kept as :class:`Symbol` (bare tokens) or :class:`str` (double
quoted strings) so that ``(ep "" "10")`` survives a round trip.  Every node
remembers the position it started at so that higher layers can report
errors against the original text.
"""

from __future__ import annotations

import re


class SexpError(ValueError):
    """Syntax error in s-expression text."""

    def __init__(self, message, line=0, column=0):
        super().__init__(f"{message} (at {line}:{column})")
        self.line = line
        self.column = column


class Symbol(str):
    """A bare token.  Subclasses ``str`` so it compares equal to its text."""

    __slots__ = ("line", "column")

    def __new__(cls, text, line=0, column=0):
        obj = super().__new__(cls, text)
        obj.line = line
        obj.column = column
        return obj


class Quoted(str):
    """A double-quoted string atom."""

    __slots__ = ("line", "column")

    def __new__(cls, text, line=0, column=0):
        obj = super().__new__(cls, text)
        obj.line = line
        obj.column = column
        return obj


class SList(list):
    """A parenthesised list; carries the position of its opening paren."""

    def __init__(self, items=(), line=0, column=0):
        super().__init__(items)
        self.line = line
        self.column = column


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<atom>[^\s()";]+)
    """,
    re.VERBOSE,
)


def _tokens(text):
    pos = 0
    line, col = 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SexpError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            yield kind, value, line, col
        nl = value.count("\n")
        if nl:
            line += nl
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    yield "eof", "", line, col


def read_all(text):
    """Parse every top-level expression in ``text``."""
    stack = [SList()]
    for kind, value, line, col in _tokens(text):
        if kind == "lpar":
            stack.append(SList(line=line, column=col))
        elif kind == "rpar":
            if len(stack) == 1:
                raise SexpError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        elif kind == "string":
            body = value[1:-1].replace('\\"', '"').replace("\\\\", "\\")
            stack[-1].append(Quoted(body, line, col))
        elif kind == "atom":
            stack[-1].append(Symbol(value, line, col))
        else:  # eof
            if len(stack) != 1:
                open_ = stack[-1]
                raise SexpError("missing ')'", open_.line, open_.column)
    return list(stack[0])


def read(text):
    """Parse exactly one expression."""
    items = read_all(text)
    if len(items) != 1:
        raise SexpError(f"expected one expression, found {len(items)}", 1, 1)
    return items[0]


def dumps(x):
    """Render nested lists/strings back to text (single line)."""
    if isinstance(x, Quoted):
        return '"' + x.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(x, (list, tuple)):
        return "(" + " ".join(dumps(y) for y in x) + ")"
    return str(x)


def position(x):
    return getattr(x, "line", 0), getattr(x, "column", 0)
