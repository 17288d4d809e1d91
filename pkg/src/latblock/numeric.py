"""Exact scalar tower: big rationals, real quadratic extensions, and a
controlled float embedding.

Rationals are carried by :class:`fractions.Fraction` (arbitrary precision,
always in lowest terms with positive denominator, which is exactly the
invariant everything downstream relies on).  Elements p + q*sqrt(d) of a
real quadratic extension live in :class:`QuadExt`.  All values are
immutable and all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Rational = Union[int, Fraction]

#: Default tolerance for comparisons between floats and exact scalars.
DEFAULT_EPS = 1e-9


def rat_arith(a: Rational, b: Rational, op: str) -> Fraction:
    """Exact rational arithmetic dispatcher for the ops '+', '-', '*', '/'.

    Division by zero raises ZeroDivisionError.  Results are always in
    lowest terms (guaranteed by Fraction).
    """
    a, b = Fraction(a), Fraction(b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError(f"unknown op {op!r}, expected one of + - * /")


def is_perfect_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True, eq=False)
class QuadExt:
    """Element p + q*sqrt(d) of the real quadratic field Q(sqrt(d)).

    d must be a positive non-square integer; values with different d do
    not compose.  Plain rationals coerce into any radicand.
    """

    rational_part: Fraction
    radical_part: Fraction
    radicand: int

    def __post_init__(self):
        object.__setattr__(self, "rational_part", Fraction(self.rational_part))
        object.__setattr__(self, "radical_part", Fraction(self.radical_part))
        if self.radicand <= 0 or is_perfect_square(self.radicand):
            raise ValueError(f"radicand must be a positive non-square, got {self.radicand}")

    def _coerce(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            if other.radicand != self.radicand:
                raise ValueError(
                    f"radicand mismatch: sqrt({self.radicand}) vs sqrt({other.radicand})"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(Fraction(other), Fraction(0), self.radicand)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExt(self.rational_part + o.rational_part,
                       self.radical_part + o.radical_part, self.radicand)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExt(self.rational_part - o.rational_part,
                       self.radical_part - o.radical_part, self.radicand)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return QuadExt(-self.rational_part, -self.radical_part, self.radicand)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p, q, d = self.rational_part, self.radical_part, self.radicand
        r, s = o.rational_part, o.radical_part
        return QuadExt(p * r + q * s * d, p * s + q * r, d)

    __rmul__ = __mul__

    def conj(self) -> "QuadExt":
        return QuadExt(self.rational_part, -self.radical_part, self.radicand)

    def norm(self) -> Fraction:
        """Galois norm p^2 - d*q^2."""
        return self.rational_part ** 2 - self.radicand * self.radical_part ** 2

    def is_rational(self) -> bool:
        return self.radical_part == 0

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            if other.radicand != self.radicand:
                return self.is_rational() and other.is_rational() \
                    and self.rational_part == other.rational_part
            return (self.rational_part == other.rational_part
                    and self.radical_part == other.radical_part)
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.rational_part == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational_part)
        return hash((self.rational_part, self.radical_part, self.radicand))

    def __float__(self):
        return float(self.rational_part) + float(self.radical_part) * math.sqrt(self.radicand)

    def __repr__(self):
        return f"({self.rational_part} + {self.radical_part}*sqrt({self.radicand}))"


def quad_mul(u: QuadExt, v: QuadExt) -> QuadExt:
    """Exact product in Q(sqrt(d)); the radicands must agree."""
    return u * v


def quad_conj_norm(u: QuadExt) -> Fraction:
    """Galois norm p^2 - d*q^2 of p + q*sqrt(d), exactly."""
    return u.norm()


def exact_sqrt(n: int):
    """sqrt(n) as an exact scalar: a Fraction if n is a perfect square,
    otherwise the QuadExt sqrt(n)."""
    if n < 0:
        raise ValueError("negative radicand")
    r = math.isqrt(n)
    if r * r == n:
        return Fraction(r)
    return QuadExt(Fraction(0), Fraction(1), n)


@dataclass(frozen=True)
class ApproxReal:
    """A double together with the tolerance its comparisons are made at.

    The float image of an exact scalar is correct to a few ulp; eps is the
    slack allowed when matching against exact values.
    """

    value: float
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    def matches(self, exact) -> bool:
        return abs(self.value - float(exact)) <= self.eps

    def __float__(self):
        return self.value


def embed_real(u, eps: float = DEFAULT_EPS) -> ApproxReal:
    """Embed an exact scalar (rational or quadratic) into a tagged double.

    The image is within 4 ulp of the true real value: Fraction-to-float is
    correctly rounded, and the QuadExt image costs one sqrt, one multiply
    and one add.
    """
    return ApproxReal(float(u), eps)


def _clear_row_denominators(row: Sequence[Rational]) -> list[int]:
    fracs = [Fraction(x) for x in row]
    mult = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    return [int(f * mult) for f in fracs]


def _primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers, first nonzero positive."""
    mult = math.lcm(*(f.denominator for f in vec))
    ints = [int(f * mult) for f in vec]
    g = math.gcd(*ints)
    if g:
        ints = [v // g for v in ints]
    for v in ints:
        if v:
            if v < 0:
                ints = [-u for u in ints]
            break
    return tuple(ints)


def rational_nullspace(matrix: Sequence[Sequence[Rational]]) -> list[tuple[int, ...]]:
    """Exact kernel basis of a small rational matrix.

    Elimination is fraction-free (Bareiss) over integers after clearing
    row denominators, so intermediate entries stay exact without rational
    blowup.  Each basis vector is returned as a coprime integer tuple with
    its first nonzero entry positive; a full-rank matrix yields [].
    """
    rows = [_clear_row_denominators(r) for r in matrix]
    nrows = len(rows)
    if nrows == 0 or len(rows[0]) == 0:
        raise ValueError("matrix must have at least one row and one column")
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")

    a = [list(r) for r in rows]
    pivot_cols: list[int] = []
    prev = 1
    pr = 0
    for pc in range(ncols):
        piv = next((i for i in range(pr, nrows) if a[i][pc] != 0), None)
        if piv is None:
            continue
        if piv != pr:
            a[pr], a[piv] = a[piv], a[pr]
        for i in range(pr + 1, nrows):
            for j in range(pc + 1, ncols):
                a[i][j] = (a[pr][pc] * a[i][j] - a[i][pc] * a[pr][j]) // prev
            a[i][pc] = 0
        prev = a[pr][pc]
        pivot_cols.append(pc)
        pr += 1
        if pr == nrows:
            break

    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        # back-substitute through the echelon rows
        for r in range(len(pivot_cols) - 1, -1, -1):
            pc = pivot_cols[r]
            s = sum((Fraction(a[r][j]) * v[j] for j in range(pc + 1, ncols)), Fraction(0))
            v[pc] = -s / a[r][pc]
        basis.append(_primitive(v))
    return basis


def det_exact(matrix: Sequence[Sequence]) -> object:
    """Exact determinant of a small square matrix by cofactor expansion.

    Works over any exact scalar with + - * (Fraction, int, QuadExt).
    """
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise ValueError("matrix must be square")
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = None
    for j in range(n):
        if matrix[0][j] == 0:
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in matrix[1:]]
        term = matrix[0][j] * det_exact(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else matrix[0][0] * 0
