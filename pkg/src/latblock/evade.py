"""Evasion families, their determinant identities, the integer obstruction
bound, and the blocking refuter for the integer-lattice quotient.

For a reduced target [[x, 0], [z, 1/x]] with x = a/b in lowest terms, the
lattice elements

    gamma_n = [[p_n, 1], [p_n*s_n - 1, s_n]],  p_n = 2*n*b^2,  s_n = (a - 2a^2)*n

have det 1 and tr(g*gamma_n) = z + n*b: an unbounded family of connecting
curves sharing the upper-right entry x.  The refuter walks this family
looking for one curve whose whole sampled trajectory clears a candidate
blocking set, and emits a replayable certificate when it finds it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certificate import BudgetExceeded, EvasionCertificate, frac_str
from .lattice import CosetRep, coset_distance, is_in_gamma
from .parsing import matrix_str, parse_matrix
from .sl2 import Mat2, curve_point, time_from_lambda

#: interior modified-time grid probed (after the midpoint) for the
#: certificate's distinguished time
_LAMBDA_GRID = [k / 34.0 for k in range(1, 34)]


class InternalConsistencyError(RuntimeError):
    """A closed-form entry disagreed with the exact matrix entry."""


@dataclass(frozen=True)
class FamilyMember:
    """One evasion curve: index n, the lattice element and g*gamma data."""

    n: int
    p: int
    s: int
    gamma: Mat2            # integer entries, det 1
    g_gamma: Mat2          # exact rational entries
    trace: Fraction        # z + n*b, strictly > 2


@dataclass(frozen=True)
class EvasionFamily:
    """The full family for one reduced target, with verified invariants."""

    g: CosetRep
    a: int
    b: int
    z: Fraction
    members: tuple[FamilyMember, ...]

    @property
    def x(self) -> Fraction:
        return Fraction(self.a, self.b)


def gen_family(g: CosetRep, count: int) -> EvasionFamily:
    """Generate the first `count` family members for a reduced target.

    Indices start at the least positive n with z + n*b > 2 and increase by
    one.  det(gamma) = 1, tr(g*gamma_n) = z + n*b and the strict increase
    of the traces are all verified exactly before returning.
    """
    if count < 0 or count > 1000:
        raise ValueError("count must be between 0 and 1000")
    x, z = g.x, g.z
    a, b = x.numerator, x.denominator
    if a <= 0:
        raise ValueError("reduced representative must have x > 0")
    n1 = max(1, math.floor((2 - z) / b) + 1)
    members = []
    prev_trace = None
    for i in range(count):
        n = n1 + i
        p = 2 * n * b * b
        s = (a - 2 * a * a) * n
        gamma = Mat2(p, 1, p * s - 1, s)
        if gamma.det() != 1:
            raise InternalConsistencyError(f"det(gamma_{n}) != 1")
        gg = g.g * gamma
        trace = Fraction(gg.trace())
        if trace != z + n * b:
            raise InternalConsistencyError(f"trace mismatch at n = {n}")
        if trace <= 2 or (prev_trace is not None and trace <= prev_trace):
            raise InternalConsistencyError(f"trace not increasing past 2 at n = {n}")
        if Fraction(gg.y) != x:
            raise InternalConsistencyError(f"upper-right entry mismatch at n = {n}")
        prev_trace = trace
        members.append(FamilyMember(n=n, p=p, s=s, gamma=gamma, g_gamma=gg, trace=trace))
    return EvasionFamily(g=g, a=a, b=b, z=z, members=tuple(members))


def entry_closed_forms(family: EvasionFamily, i: int) -> tuple[Fraction, Fraction]:
    """Closed forms (u_i, z_i) for member i (0-based position).

    u_i = (4ab - b)*n - z is the diagonal difference x_i - w_i of
    g*gamma_i, and z_i = b^3(2-4a)*n^2 + 2zb^2*n - b/a its lower-left
    entry; both are checked against the exact matrix before returning.
    """
    m = family.members[i]
    a, b, z = family.a, family.b, family.z
    u = Fraction((4 * a * b - b) * m.n) - z
    zz = Fraction(b ** 3 * (2 - 4 * a) * m.n ** 2) + 2 * z * b * b * m.n - Fraction(b, a)
    gg = m.g_gamma
    if u != Fraction(gg.x) - Fraction(gg.w):
        raise InternalConsistencyError(f"u closed form mismatch at position {i}")
    if zz != Fraction(gg.z):
        raise InternalConsistencyError(f"z closed form mismatch at position {i}")
    return u, zz


def build_B(ei: FamilyMember, ej: FamilyMember) -> tuple[tuple[Fraction, ...], ...]:
    """The 4x4 coefficient matrix B(i,j) of the relative position
    (g gamma_i)^{-t_i} (g gamma_j)^{t_j} in the basis
    (a_i a_j, lambda_i a_j, a_i lambda_j, lambda_i lambda_j).

    Rows give the four matrix entries (11, 12, 21, 22) of the product; all
    entries are exact rationals in the entries of g*gamma_i and g*gamma_j.
    """
    xi, yi, zi, wi = (Fraction(e) for e in ei.g_gamma.entries())
    xj, yj, zj, wj = (Fraction(e) for e in ej.g_gamma.entries())
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    return (
        (Fraction(1), h * (wi - xi), h * (xj - wj), q * (wi - xi) * (xj - wj) - yi * zj),
        (Fraction(0), -yi, yj, h * yj * (wi - xi) - h * yi * (wj - xj)),
        (Fraction(0), -zi, zj, h * zj * (xi - wi) - h * zi * (xj - wj)),
        (Fraction(1), h * (xi - wi), h * (wj - xj), q * (xi - wi) * (wj - xj) - zi * yj),
    )


def detB_closed(family: EvasionFamily, i: int, j: int) -> Fraction:
    """Closed-form determinant of B(i,j):

        x * (u_i^2 z_j + u_j^2 z_i - u_i u_j (z_i + z_j) - x (z_j - z_i)^2)

    with x the shared upper-right entry.  Exactly equals det(build_B).
    """
    ui, zi = entry_closed_forms(family, i)
    uj, zj = entry_closed_forms(family, j)
    x = family.x
    return x * (ui * ui * zj + uj * uj * zi - ui * uj * (zi + zj) - x * (zj - zi) ** 2)


def detB_poly(family: EvasionFamily):
    """detB as an exact bivariate function of the raw indices (n_j, n_i).

    The leading term in the first argument is -a^2 b^4 (2-4a)^2 n_j^4, so
    the greedy nonzero-subsequence construction applies to it.
    """
    a, b, z = family.a, family.b, family.z
    x = family.x

    def u(n):
        return Fraction((4 * a * b - b) * n) - z

    def zz(n):
        return Fraction(b ** 3 * (2 - 4 * a) * n * n) + 2 * z * b * b * n - Fraction(b, a)

    def poly(nj, ni):
        ui, zi = u(ni), zz(ni)
        uj, zj = u(nj), zz(nj)
        return x * (ui * ui * zj + uj * uj * zi - ui * uj * (zi + zj) - x * (zj - zi) ** 2)

    return poly


def norm_square_obstruction(k: int, l: int, y: int) -> int:
    """Least bound X* past which (4kl - 4k^2) y^2 = (A + k x)(A - k x) has
    no positive integer solution A for any integer x >= X*.

    Consecutive squares around k*x differ by 2kx + 1, so once
    2k*x + 1 > N = 4k(l-k)y^2 there is no room for A^2 = N + (kx)^2;
    X* = floor((N-1)/(2k)) + 1 is the first such x.
    """
    if k < 1 or y < 1:
        raise ValueError("k and y must be positive")
    if l <= k:
        raise ValueError(f"need k < l (lambda^2 = k/l < 1), got k={k}, l={l}")
    n = 4 * k * (l - k) * y * y
    return (n - 1) // (2 * k) + 1


def norm_square_solutions(k: int, l: int, y: int) -> list[tuple[int, int]]:
    """All positive solutions (x, A) of (4kl-4k^2) y^2 = (A+kx)(A-kx),
    enumerated through the divisor pairs of the constant left side.

    Every returned x lies below norm_square_obstruction(k, l, y).
    """
    n = 4 * k * (l - k) * y * y
    if k < 1 or y < 1 or l <= k:
        raise ValueError("need positive k, y and k < l")
    sols = []
    for d in range(1, math.isqrt(n) + 1):
        if n % d:
            continue
        e = n // d
        if (e - d) % 2:
            continue
        aa = (e + d) // 2
        kx = (e - d) // 2
        if kx > 0 and kx % k == 0:
            sols.append((kx // k, aa))
    return sorted(sols)


def embed_sln(g2: Mat2, n: int, i: int) -> tuple[tuple, ...]:
    """Embed a det-1 2x2 matrix into the n x n identity at rows/columns
    (i, i+1), 1-indexed; integer inputs land in the integer lattice."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 1 <= i <= n - 1:
        raise ValueError(f"index i must satisfy 1 <= i <= {n - 1}, got {i}")
    if g2.det() != 1:
        raise ValueError("determinant must be exactly 1")
    rows = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    r = i - 1
    rows[r][r] = g2.x
    rows[r][r + 1] = g2.y
    rows[r + 1][r] = g2.z
    rows[r + 1][r + 1] = g2.w
    return tuple(tuple(row) for row in rows)


@dataclass(frozen=True)
class BlockingCandidate:
    """A finite candidate blocking set: float representatives plus the
    clearance tolerance the refuter must beat."""

    points: tuple[Mat2, ...]
    epsilon: float
    max_points: int = 64

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("tolerance must be positive")
        if len(self.points) > self.max_points:
            raise ValueError(f"at most {self.max_points} candidate points allowed")
        for p in self.points:
            d = float(p.to_float().det())
            if abs(d - 1.0) > 1e-6:
                raise ValueError(f"candidate point determinant {d} is not 1")

    def check_apart_from(self, target: Mat2, eps: float | None = None):
        """Candidates may not sit on the endpoint cosets."""
        tol = self.epsilon if eps is None else eps
        ident = Mat2.identity().to_float()
        for idx, p in enumerate(self.points):
            if coset_distance(p, ident) <= tol:
                raise ValueError(f"candidate {idx} coincides with the identity coset")
            if coset_distance(p, target) <= tol:
                raise ValueError(f"candidate {idx} coincides with the target coset")


def _curve_array(g_gamma: Mat2, trace: float, density: int) -> np.ndarray:
    """All density curve samples of (g gamma)^t, t in [0, 1], as (N,2,2)."""
    G = np.array([[float(g_gamma.x), float(g_gamma.y)],
                  [float(g_gamma.z), float(g_gamma.w)]])
    omega = math.acosh(trace / 2.0)
    tau = np.linspace(0.0, 1.0, density)
    lam = np.sinh(tau * omega) / math.sinh(omega)
    a_lam = np.sqrt(1.0 + (trace * trace / 4.0 - 1.0) * lam * lam)
    coef = a_lam - 0.5 * trace * lam
    eye = np.eye(2)
    return coef[:, None, None] * eye + lam[:, None, None] * G


def _clearance_profile(samples: np.ndarray, point: Mat2, eps: float) -> float:
    """Minimum certified coset clearance between curve samples and one
    candidate point.

    Fast path: with W = point^-1 * sample, any lattice element is at least
    the fractional distance of W from the integer grid away, so
    ||W - round(W)||_F / ||W||_F bounds the canonical distance from below
    (for both orientations, since the det-1 adjugate preserves the norm).
    Samples whose bound dips to eps or lower are re-measured exactly
    through the canonical representative.
    """
    pf = point.to_float()
    det = pf.det()
    pinv = np.array([[float(pf.w), -float(pf.y)], [-float(pf.z), float(pf.x)]]) / det
    w = np.einsum("ab,nbc->nac", pinv, samples)
    w_adj = np.empty_like(w)
    w_adj[:, 0, 0] = w[:, 1, 1]
    w_adj[:, 0, 1] = -w[:, 0, 1]
    w_adj[:, 1, 0] = -w[:, 1, 0]
    w_adj[:, 1, 1] = w[:, 0, 0]
    frac = np.minimum(
        np.linalg.norm(w - np.rint(w), axis=(1, 2)),
        np.linalg.norm(w_adj - np.rint(w_adj), axis=(1, 2)),
    )
    norms = np.linalg.norm(w, axis=(1, 2))
    bounds = frac / norms
    clearance = float(np.min(bounds[bounds > eps])) if np.any(bounds > eps) else math.inf
    for idx in np.nonzero(bounds <= eps)[0]:
        s = samples[idx]
        exact = coset_distance(Mat2(s[0, 0], s[0, 1], s[1, 0], s[1, 1]), pf)
        clearance = min(clearance, exact)
    return clearance


def _certificate_for(family: EvasionFamily, index: int, candidate: BlockingCandidate,
                     clearances: list[float], density: int) -> EvasionCertificate:
    member = family.members[index]
    trace = float(member.trace)
    omega = math.acosh(trace / 2.0)
    ident = Mat2.identity().to_float()
    # distinguished time: the midpoint, then the interior lambda grid
    probes = [0.5] + [time_from_lambda(lam, omega) for lam in _LAMBDA_GRID]
    chosen_t = None
    for t in probes:
        pt = curve_point(family.g.g, member.gamma, t)
        if all(coset_distance(pt, p) > candidate.epsilon for p in candidate.points):
            chosen_t = t
            break
    if chosen_t is None:  # cannot happen when the whole curve clears
        chosen_t = 0.5
    lam = math.sinh(chosen_t * omega) / math.sinh(omega)
    a_lam = math.sqrt(1.0 + (trace * trace / 4.0 - 1.0) * lam * lam)
    start = curve_point(family.g.g, member.gamma, 0.0)
    end = curve_point(family.g.g, member.gamma, 1.0)
    attest = {
        "det_gamma": frac_str(member.gamma.det()),
        "gamma_in_lattice": is_in_gamma(member.gamma),
        "trace": frac_str(member.trace),
        "trace_float": trace,
        "endpoint_start_residual": coset_distance(start, ident),
        "endpoint_end_residual": coset_distance(end, family.g.g.to_float()),
        "modified_time_residual": abs(a_lam ** 2 - (trace ** 2 / 4 - 1) * lam ** 2 - 1),
    }
    return EvasionCertificate(
        mode="sl2",
        target={"x": frac_str(family.x), "z": frac_str(family.z),
                "matrix": matrix_str(family.g.g)},
        family_params={"a": str(family.a), "b": str(family.b), "z": frac_str(family.z)},
        candidates=[[[float(p.x), float(p.y)], [float(p.z), float(p.w)]]
                    for p in candidate.points],
        gamma={"matrix": matrix_str(member.gamma), "n": member.n},
        gamma_index=index + 1,
        t=chosen_t,
        lam=lam,
        a_lam=a_lam,
        clearances=clearances,
        attestations=attest,
        sampling={"density": density, "epsilon": candidate.epsilon},
    )


def refute_blocking(target: CosetRep, candidate: BlockingCandidate,
                    budget: int = 100, density: int = 10_000) -> EvasionCertificate:
    """Find a connecting curve clearing every candidate point by more than
    the tolerance, walking the evasion family in order.

    Success returns a fully populated certificate.  Exhausting the budget
    raises BudgetExceeded with the best clearance seen; it is never a
    claim that the candidate set blocks.
    """
    candidate.check_apart_from(target.g.to_float())
    family = gen_family(target, min(budget, 1000))
    best = (-math.inf, 0)
    for index, member in enumerate(family.members):
        samples = _curve_array(member.g_gamma, float(member.trace), density)
        clearances = []
        ok = True
        for p in candidate.points:
            c = _clearance_profile(samples, p, candidate.epsilon)
            clearances.append(c)
            if c <= candidate.epsilon:
                ok = False
                break
        worst = min(clearances) if clearances else math.inf
        if ok:
            return _certificate_for(family, index, candidate, clearances, density)
        if worst > best[0]:
            best = (worst, index + 1)
    raise BudgetExceeded(budget, best[0], best[1])


def replay_certificate(cert: EvasionCertificate) -> dict:
    """Re-run a certificate's verdict from its stored data.

    Recomputes every clearance at the stored sampling density, re-verifies
    the exact attestations, and reports the maximum deviation from the
    stored clearances.
    """
    if cert.mode != "sl2":
        raise ValueError(f"not an integer-lattice certificate: mode {cert.mode!r}")
    g = parse_matrix(cert.target["matrix"])
    gamma = parse_matrix(cert.gamma["matrix"])
    if gamma.det() != 1 or not is_in_gamma(gamma):
        raise ValueError("stored gamma is not a lattice element")
    a = int(cert.family_params["a"])
    b = int(cert.family_params["b"])
    z = Fraction(cert.family_params["z"])
    n = cert.gamma["n"]
    gg = g * gamma
    trace = Fraction(gg.trace())
    if trace != z + n * b:
        raise ValueError("stored trace attestation failed to re-verify")
    if Fraction(cert.attestations["trace"]) != trace:
        raise ValueError("trace attestation mismatch")
    points = [Mat2(p[0][0], p[0][1], p[1][0], p[1][1]) for p in cert.candidates]
    samples = _curve_array(gg, float(trace), cert.sampling["density"])
    eps = cert.sampling["epsilon"]
    clearances = [_clearance_profile(samples, p, eps) for p in points]
    deviation = max((abs(c - s) for c, s in zip(clearances, cert.clearances)),
                    default=0.0)
    if any(c <= eps for c in clearances):
        raise ValueError("replay found a clearance at or below tolerance")
    return {"clearances": clearances, "max_deviation": deviation,
            "verified": deviation <= 1e-12}
