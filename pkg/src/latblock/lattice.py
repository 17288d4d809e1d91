"""Exact algebra on the integer lattice side: membership, coset reduction,
canonical representatives, and Z-linear dependence of coset elements.

Lemma-level checks run in exact rational arithmetic throughout; the
tolerance paths exist only for the floating distance work the refuter
needs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .numeric import DEFAULT_EPS, rational_nullspace
from .sl2 import Mat2

#: enumeration window around the Gauss-reduced basis used by canonical_rep
_WINDOW = 2

#: all integer 2x2 matrices with entries in [-_WINDOW, _WINDOW] and det +-1,
#: paired with their determinant, in lexicographic entry order
_UNIMODULAR_WINDOW: list[tuple[tuple[int, int, int, int], int]] = [
    ((a, b, c, d), a * d - b * c)
    for a, b, c, d in itertools.product(range(-_WINDOW, _WINDOW + 1), repeat=4)
    if abs(a * d - b * c) == 1
]


class IllConditionedError(ValueError):
    """Canonicalization refused: the input matrix is numerically singular."""


@dataclass(frozen=True)
class CosetRep:
    """Lower-triangular coset representative [[x, 0], [z, 1/x]], x > 0.

    gamma is the lattice element carrying the original matrix onto g.
    """

    g: Mat2
    gamma: Mat2
    normalized: bool = True

    @property
    def x(self) -> Fraction:
        return Fraction(self.g.x)

    @property
    def z(self) -> Fraction:
        return Fraction(self.g.z)


@dataclass(frozen=True)
class DependenceWitness:
    """Integer coefficients m with sum(m_i * element_i) = 0 exactly."""

    coefficients: tuple[int, ...]
    elements: tuple[Mat2, ...]

    def residual(self) -> Mat2:
        acc = Mat2.zero()
        for m, e in zip(self.coefficients, self.elements):
            acc = acc + m * e
        return acc


def is_in_gamma(m: Mat2, eps: float | None = None) -> bool:
    """Integer-lattice membership: integer entries and determinant 1.

    eps=None demands exactness (rational entries with denominator 1);
    otherwise entries must sit within eps of integers whose rounded matrix
    has determinant exactly 1.
    """
    if eps is None:
        for e in m.entries():
            f = Fraction(e)
            if f.denominator != 1:
                return False
        return m.det() == 1
    ints = [round(float(e)) for e in m.entries()]
    if any(abs(float(e) - i) > eps for e, i in zip(m.entries(), ints)):
        return False
    return ints[0] * ints[3] - ints[1] * ints[2] == 1


def same_coset(p: Mat2, q: Mat2, eps: float | None = None) -> bool:
    """Whether p and q represent the same right coset of the lattice."""
    return is_in_gamma(p.inverse() * q, eps)


def _minimal_bezout(s: int, q: int) -> tuple[int, int]:
    """Solve p*s - r*q = 1, gcd(s, q) = 1, choosing |p| minimal and p > 0
    on ties.  The choice is what makes coset reduction reproducible."""
    g, u, v = _egcd(s, q)
    assert g == 1
    p0, r0 = u, -v  # p0*s - r0*q = u*s + v*q = 1
    if q != 0:
        k = round(Fraction(-p0, q))
        best = None
        for kk in (k - 1, k, k + 1):
            p = p0 + kk * q
            key = (abs(p), 0 if p > 0 else 1)
            if best is None or key < best[0]:
                best = (key, p, r0 + kk * s)
        _, p, r = best
    else:
        p, r = p0, r0
    return p, r


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, u, v) with u*a + v*b = g = gcd(a, b)."""
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, u, v = _egcd(b, a % b)
    return g, v, u - (a // b) * v


def coset_reduce(g1: Mat2) -> CosetRep:
    """Reduce a rational det-1 matrix to the [[x, 0], [z, 1/x]] form.

    Multiplies on the right by a lattice element gamma built from the
    lowest-terms fraction s/q = -x/y, then sign-normalizes to x > 0 using
    -I.  The product g1^-1 * g is verified to be a lattice element before
    returning.
    """
    entries = [Fraction(e) for e in g1.entries()]
    if g1.det() != 1:
        raise ValueError(f"determinant must be exactly 1, got {g1.det()}")
    x, y = entries[0], entries[1]
    if y == 0:
        gamma = Mat2.identity()
        g = Mat2(*entries)
    else:
        f = -x / y
        s, q = f.numerator, f.denominator
        p, r = _minimal_bezout(s, q)
        gamma = Mat2(p, q, r, s)
        g = Mat2(*entries) * gamma
    if Fraction(g.x) < 0:  # x != 0 since det(g) = x * w = 1
        g = -g
        gamma = -gamma
    assert is_in_gamma(g1.inverse() * g), "reduction left the coset"
    return CosetRep(g=g, gamma=gamma)


def _gauss_reduce_columns(g: Mat2) -> tuple[Mat2, Mat2]:
    """Lagrange-Gauss reduce the column lattice of g.

    Returns (reduced, T) with reduced = g * T, T integer with det +-1.
    """
    c1 = [float(g.x), float(g.z)]
    c2 = [float(g.y), float(g.w)]
    t = [[1, 0], [0, 1]]  # columns of T
    for _ in range(256):
        n1 = c1[0] ** 2 + c1[1] ** 2
        n2 = c2[0] ** 2 + c2[1] ** 2
        if n1 > n2:
            c1, c2 = c2, c1
            t = [t[1], t[0]]
            n1, n2 = n2, n1
        if n1 == 0:
            raise IllConditionedError("degenerate column lattice")
        mu = round((c1[0] * c2[0] + c1[1] * c2[1]) / n1)
        if mu == 0:
            break
        c2 = [c2[0] - mu * c1[0], c2[1] - mu * c1[1]]
        t = [t[0], [t[1][0] - mu * t[0][0], t[1][1] - mu * t[0][1]]]
    T = Mat2(t[0][0], t[1][0], t[0][1], t[1][1])
    reduced = Mat2(c1[0], c2[0], c1[1], c2[1])
    return reduced, T


def canonical_gamma(g: Mat2, eps: float = DEFAULT_EPS) -> Mat2:
    """Lattice element gamma minimizing the Frobenius distance of g*gamma
    to the identity, found by Gauss reduction plus a bounded enumeration.

    Deterministic: ties break by the lexicographically smallest entry
    tuple of gamma.  Raises IllConditionedError when the input is too
    close to singular for the reduction to mean anything.
    """
    gf = g.to_float()
    d = gf.det()
    if abs(d - 1.0) > max(eps, 1e-7):
        raise ValueError(f"determinant must be 1 within tolerance, got {d}")
    cond = gf.fro_norm() * gf.inverse().fro_norm()
    if cond > 1e12:
        raise IllConditionedError(f"condition number {cond:.3e} exceeds 1e12")
    reduced, T = _gauss_reduce_columns(gf)
    det_t = T.x * T.w - T.y * T.z
    best = None
    for (a, b, c, dd), det_s in _UNIMODULAR_WINDOW:
        if det_t * det_s != 1:
            continue
        # candidate = reduced * S, with S = [[a, b], [c, dd]]
        m = Mat2(reduced.x * a + reduced.y * c, reduced.x * b + reduced.y * dd,
                 reduced.z * a + reduced.w * c, reduced.z * b + reduced.w * dd)
        dist = (m.x - 1.0) ** 2 + m.y ** 2 + m.z ** 2 + (m.w - 1.0) ** 2
        gamma = (T.x * a + T.y * c, T.x * b + T.y * dd,
                 T.z * a + T.w * c, T.z * b + T.w * dd)
        key = (dist, gamma)
        if best is None or key < best:
            best = key
    return Mat2(*best[1])


def canonical_rep(g: Mat2, eps: float = DEFAULT_EPS) -> Mat2:
    """Distinguished coset representative g*gamma nearest the identity.

    Idempotent and right-lattice-invariant to float accuracy.
    """
    return g.to_float() * canonical_gamma(g, eps).to_float()


def coset_distance(p: Mat2, q: Mat2) -> float:
    """Frobenius distance of the canonicalized relative position from the
    identity, symmetrized over the two orientations.

    Zero exactly when p and q share a coset (within float accuracy) and
    symmetric by construction.  Only approximately a metric: the chordal
    norm obeys the triangle inequality to second order in the separations
    (tight for nearby points, with O(d^2) slack at distance d), and the
    enumeration window is bounded.
    """
    m = p.inverse().to_float() * q.to_float()
    d1 = canonical_rep(m).fro_dist(Mat2.identity())
    d2 = canonical_rep(m.inverse()).fro_dist(Mat2.identity())
    return min(d1, d2)


def five_dependence(elems: Sequence[Mat2]) -> DependenceWitness:
    """Integer dependence among five exact 2x2 matrices.

    Five vectors in the 4-dimensional rational flattening always carry a
    nonzero kernel vector; the witness is re-multiplied and checked to be
    exactly zero before returning.
    """
    if len(elems) != 5:
        raise ValueError("exactly five elements required")
    flat = [[Fraction(e) for e in m.entries()] for m in elems]
    matrix = [[flat[j][i] for j in range(5)] for i in range(4)]
    kernel = rational_nullspace(matrix)
    coeffs = kernel[0]
    witness = DependenceWitness(coeffs, tuple(elems))
    res = witness.residual()
    assert res.entries() == (0, 0, 0, 0), "dependence failed to re-multiply to zero"
    return witness


class SpanSolver:
    """Fixed-multiplier solver over the rational span of coset elements.

    For independent elements g1..gn there is a single nonzero integer m0
    such that every rational-span member g satisfies sum(m_i g_i) = m0*g
    with integer m_i; solve() produces those coefficients.
    """

    def __init__(self, basis: Sequence[Mat2]):
        if not 1 <= len(basis) <= 4:
            raise ValueError("basis size must be between 1 and 4")
        self.basis = tuple(basis)
        n = len(basis)
        cols = [[Fraction(e) for e in m.entries()] for m in basis]
        a = [[cols[j][i] for j in range(n)] for i in range(4)]  # 4 x n
        if rational_nullspace(a):
            raise ValueError("basis elements are rationally dependent")
        self._rows = None
        for rows in itertools.combinations(range(4), n):
            sub = [a[i] for i in rows]
            if _det_frac(sub) != 0:
                self._rows = rows
                self._sub = sub
                break
        assert self._rows is not None
        inv = _inv_frac(self._sub)
        self.m0 = math.lcm(*(f.denominator for row in inv for f in row))
        self._scaled_inv = [[f * self.m0 for f in row] for row in inv]

    def solve(self, g: Mat2) -> tuple[int, ...]:
        """Integer coefficients m with sum(m_i * basis_i) = m0 * g.

        Raises ValueError when g lies outside the rational span.
        """
        target = [Fraction(e) for e in g.entries()]
        picked = [target[i] for i in self._rows]
        m = [sum(self._scaled_inv[i][j] * picked[j] for j in range(len(picked)))
             for i in range(len(picked))]
        if any(f.denominator != 1 for f in m):
            raise ValueError("element is not in the rational span")
        coeffs = tuple(int(f) for f in m)
        acc = Mat2.zero()
        for c, b in zip(coeffs, self.basis):
            acc = acc + c * b
        if acc.entries() != tuple(self.m0 * t for t in target):
            raise ValueError("element is not in the rational span")
        return coeffs


def span_multiplier(basis: Sequence[Mat2]) -> SpanSolver:
    """Build the fixed-multiplier solver for a rationally independent basis."""
    return SpanSolver(basis)


def _det_frac(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = Fraction(0)
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [[r[k] for k in range(n) if k != j] for r in rows[1:]]
        term = rows[0][j] * _det_frac(minor)
        total += -term if j % 2 else term
    return total


def _inv_frac(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class TimesProjectionReport:
    """Residuals of the modified-time projections of a matrix dependence."""

    lambda_residual: float
    a_residual: float
    shared_y: float

    def ok(self, tol: float = 1e-9) -> bool:
        return self.lambda_residual <= tol and self.a_residual <= tol


def dependence_projects_to_times(
    coefficients: Sequence[int],
    lambdas: Sequence[float],
    a_lambdas: Sequence[float],
    y_entries: Sequence,
) -> TimesProjectionReport:
    """Check that a dependence among curve points projects onto the
    modified times: sum(m_i lambda_i) = 0 and sum(m_i a(lambda_i)) = 0.

    Requires all upper-right entries of the underlying g*gamma_i to agree
    (they all equal the coset's x), otherwise the projection argument does
    not apply.
    """
    ys = [Fraction(y) if not isinstance(y, float) else y for y in y_entries]
    if ys and any(y != ys[0] for y in ys[1:]):
        raise ValueError("upper-right entries differ; projection precondition violated")
    lam_res = abs(sum(m * l for m, l in zip(coefficients, lambdas)))
    a_res = abs(sum(m * a for m, a in zip(coefficients, a_lambdas)))
    return TimesProjectionReport(lam_res, a_res, float(ys[0]) if ys else 0.0)


def subsequence_nonzero(
    poly: Callable[[object, object], object],
    ys: Sequence,
    length: int,
) -> list[int]:
    """Greedy index selection keeping a bivariate polynomial off zero.

    Picks indices f with f[0] = 0 and each next index the least one whose
    value keeps poly(y_new, y_old) and poly(y_old, y_new) nonzero against
    everything already chosen, so every ordered pair of selected points is
    a nonzero of poly.  Raises ValueError when ys is exhausted first.
    """
    if length <= 0:
        return []
    chosen = [0]
    nxt = 1
    while len(chosen) < length:
        while nxt < len(ys):
            y = ys[nxt]
            if all(poly(y, ys[i]) != 0 and poly(ys[i], y) != 0 for i in chosen):
                chosen.append(nxt)
                nxt += 1
                break
            nxt += 1
        else:
            raise ValueError(
                f"sequence exhausted at length {len(chosen)} before reaching {length}")
    return chosen
