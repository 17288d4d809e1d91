"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the code paths they check: the
exponential oracle is a truncated power series with scaling and squaring,
coset minima come from exhaustive enumeration, and Pell solutions from a
rising brute-force search.
"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from latblock.sl2 import Mat2

_ELEMENTARY = [
    Mat2(1, 1, 0, 1), Mat2(1, -1, 0, 1),
    Mat2(1, 0, 1, 1), Mat2(1, 0, -1, 1),
    Mat2(0, -1, 1, 0),
]


@pytest.fixture
def rng():
    return random.Random(20260809)


def random_gamma(rng: random.Random, bound: int = 50) -> Mat2:
    """Random integer-lattice element with entries bounded by `bound`,
    built as a generator walk that stops before leaving the box."""
    cur = Mat2.identity()
    for _ in range(rng.randrange(1, 48)):
        nxt = cur * rng.choice(_ELEMENTARY)
        if max(abs(e) for e in nxt.entries()) > bound:
            break
        cur = nxt
    return cur


def random_traceless(rng: random.Random, scale: float = 2.0) -> Mat2:
    a = rng.uniform(-scale, scale)
    return Mat2(a, rng.uniform(-scale, scale), rng.uniform(-scale, scale), -a)


def random_hyperbolic(rng: random.Random, scale: float = 1.5) -> Mat2:
    """Random group element with trace > 2 (float)."""
    while True:
        x = random_traceless(rng, scale)
        disc = float(x.x) ** 2 + float(x.y) * float(x.z)
        if disc > 1e-3:
            return series_exp(x)


def series_exp(x: Mat2, degree: int = 30) -> Mat2:
    """Scaling-and-squaring power-series exponential, degree-30 tail."""
    xf = x.to_float()
    norm = max(abs(e) for e in xf.entries())
    squarings = 0
    while norm > 0.5:
        norm /= 2.0
        squarings += 1
    y = (1.0 / 2 ** squarings) * xf
    term = Mat2.identity().to_float()
    acc = term
    for k in range(1, degree + 1):
        term = (1.0 / k) * (term * y)
        acc = acc + term
    for _ in range(squarings):
        acc = acc * acc
    return acc


def unimodular_box(bound: int) -> np.ndarray:
    """All integer matrices with det 1 and |entries| <= bound, as an
    (N, 2, 2) float array, enumerated through the divisor pairs of
    1 + q*r."""
    mats = []
    for q in range(-bound, bound + 1):
        for r in range(-bound, bound + 1):
            n = 1 + q * r
            if n == 0:
                for free in range(-bound, bound + 1):
                    mats.append((0, q, r, free))
                    mats.append((free, q, r, 0))
                continue
            for d in range(1, bound + 1):
                if abs(n) % d:
                    continue
                other = abs(n) // d
                if other > bound:
                    continue
                for p in {d, -d}:
                    s, rem = divmod(n, p)
                    if rem == 0 and abs(s) <= bound:
                        mats.append((p, q, r, s))
    arr = np.array(sorted(set(mats)), dtype=float)
    return arr.reshape(-1, 2, 2)


def brute_coset_distance(p: Mat2, q: Mat2, box: np.ndarray) -> float:
    """min over enumerated gamma of ||M*gamma - I|| and ||gamma*M - I||."""
    m = np.array([[float(e) for e in (p.inverse() * q).entries()[:2]],
                  [float(e) for e in (p.inverse() * q).entries()[2:]]])
    eye = np.eye(2)
    right = np.einsum("ab,nbc->nac", m, box) - eye
    left = np.einsum("nab,bc->nac", box, m) - eye
    d_right = np.sqrt((right ** 2).sum(axis=(1, 2))).min()
    d_left = np.sqrt((left ** 2).sum(axis=(1, 2))).min()
    return float(min(d_right, d_left))


def brute_pell(d: int, q_max: int = 200_000) -> tuple[int, int]:
    """Least (p, q) with p^2 - d q^2 = 1, by rising q."""
    for q in range(1, q_max):
        t = 1 + d * q * q
        p = math.isqrt(t)
        if p * p == t:
            return p, q
    raise AssertionError(f"no Pell solution below q = {q_max}")


def brute_split_witness(a: int, b: int, bound: int = 100):
    """Least nontrivial (x, y, z) with a x^2 + b y^2 = z^2, or None."""
    for n in range(1, bound + 1):
        for x in range(n + 1):
            for y in range(n + 1):
                if max(x, y) != n or (x == 0 and y == 0):
                    continue
                t = a * x * x + b * y * y
                z = math.isqrt(t)
                if z * z == t:
                    return (x, y, z)
    return None


def brute_obstruction_solutions(k: int, l: int, y: int, a_max: int = 10_000):
    """All (x, A) with (4kl - 4k^2) y^2 + (k x)^2 = A^2, A <= a_max."""
    n = 4 * k * (l - k) * y * y
    sols = []
    for aa in range(1, a_max + 1):
        t = aa * aa - n
        if t <= 0:
            continue
        kx = math.isqrt(t)
        if kx * kx == t and kx > 0 and kx % k == 0:
            sols.append((kx // k, aa))
    return sols


def frac_mat(entries) -> Mat2:
    return Mat2(*(Fraction(e) for e in entries))
