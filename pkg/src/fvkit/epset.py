"""Eventually periodic subsets of the natural numbers.

An ``EPSet`` is given by a finite prefix and a nonempty period of bits; bit
``n`` is ``prefix[n]`` for ``n < len(prefix)`` and otherwise cycles through
the period.  With J the finite sets these form an atomic Boolean algebra
with infinitely many atoms whose quotient by J is atomless, and every
operation is exactly computable.
"""

from __future__ import annotations

import math
from functools import total_ordering
from typing import Iterable, Tuple

from . import sexp


class EPError(ValueError):
    """Malformed eventually periodic set."""


def _check_bits(s, what):
    if not isinstance(s, str) or any(ch not in "01" for ch in s):
        raise EPError(f"{what} must be a string of 0/1 characters, got {s!r}")


@total_ordering
class EPSet:
    __slots__ = ("prefix", "period")

    def __init__(self, prefix: str = "", period: str = "0"):
        _check_bits(prefix, "prefix")
        _check_bits(period, "period")
        if not period:
            raise EPError("period must be nonempty")
        self.prefix, self.period = _canonical(prefix, period)

    # construction ----------------------------------------------------
    @classmethod
    def empty(cls):
        return cls("", "0")

    @classmethod
    def full(cls):
        return cls("", "1")

    @classmethod
    def finite(cls, elements: Iterable[int]):
        elements = set(elements)
        if any(e < 0 for e in elements):
            raise EPError("elements must be natural numbers")
        size = max(elements) + 1 if elements else 0
        return cls("".join("1" if k in elements else "0" for k in range(size)), "0")

    @classmethod
    def residue(cls, modulus: int, r: int = 0):
        """Numbers congruent to ``r`` modulo ``modulus``."""
        return cls("", "".join("1" if k == r % modulus else "0" for k in range(modulus)))

    # queries ---------------------------------------------------------
    def __contains__(self, n: int) -> bool:
        if n < len(self.prefix):
            return self.prefix[n] == "1"
        return self.period[(n - len(self.prefix)) % len(self.period)] == "1"

    def is_finite(self) -> bool:
        return "1" not in self.period

    def count(self):
        """Number of elements, or ``None`` when infinite."""
        return self.prefix.count("1") if self.is_finite() else None

    def elements(self, limit: int):
        """The elements below ``limit``."""
        return [n for n in range(limit) if n in self]

    def nth_elements(self, k: int):
        """The first ``k`` elements (fewer if the set is smaller)."""
        if self.is_finite():
            return [n for n, b in enumerate(self.prefix) if b == "1"][:k]
        out, n = [], 0
        while len(out) < k:
            if n in self:
                out.append(n)
            n += 1
        return out

    # Boolean operations ----------------------------------------------
    def _combine(self, other, op):
        length = max(len(self.prefix), len(other.prefix))
        per = math.lcm(len(self.period), len(other.period))
        a, b = self._bits(length, per), other._bits(length, per)
        bits = "".join("1" if op(x == "1", y == "1") else "0" for x, y in zip(a, b))
        return EPSet(bits[:length], bits[length:])

    def _bits(self, length, per):
        return "".join("1" if n in self else "0" for n in range(length + per))

    def __and__(self, other):
        return self._combine(other, lambda x, y: x and y)

    def __or__(self, other):
        return self._combine(other, lambda x, y: x or y)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x and not y)

    def __xor__(self, other):
        return self._combine(other, lambda x, y: x != y)

    def __invert__(self):
        return EPSet(self.prefix.translate(_FLIP), self.period.translate(_FLIP))

    def __le__(self, other):
        return (self - other).is_empty()

    def __lt__(self, other):
        return self <= other and self != other

    def is_empty(self):
        return "1" not in self.prefix and "1" not in self.period

    # pieces used by witness search -----------------------------------
    def take(self, k: int) -> "EPSet":
        """The first ``k`` elements as a finite set."""
        return EPSet.finite(self.nth_elements(k))

    def every(self, q: int, r: int = 0) -> "EPSet":
        """Elements whose position within this set is congruent to r mod q."""
        length = len(self.prefix)
        per = len(self.period) * q
        bits, seen = [], 0
        for n in range(length + per):
            if n in self:
                bits.append("1" if seen % q == r else "0")
                seen += 1
            else:
                bits.append("0")
        s = "".join(bits)
        return EPSet(s[:length], s[length:])

    # identity --------------------------------------------------------
    def key(self) -> Tuple[str, str]:
        return (self.prefix, self.period)

    def __eq__(self, other):
        return isinstance(other, EPSet) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return render_ep(self)


_FLIP = str.maketrans("01", "10")


def _canonical(prefix, period):
    # shortest period
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            period = period[:d]
            break
    # absorb the tail of the prefix into the period
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1] + period[:-1]
    return prefix, period


def render_ep(s: EPSet) -> str:
    return f'(ep "{s.prefix}" "{s.period}")'


def parse_ep(text_or_node) -> EPSet:
    node = sexp.read(text_or_node) if isinstance(text_or_node, str) else text_or_node
    if (not isinstance(node, list) or len(node) != 3 or node[0] != "ep"
            or not all(isinstance(x, sexp.Quoted) for x in node[1:])):
        raise EPError('expected (ep "prefix" "period")')
    return EPSet(str(node[1]), str(node[2]))
