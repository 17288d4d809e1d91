"""Closed-form exponential, logarithm and one-parameter curves in SL(2,R).

A traceless tangent matrix X = [[a, b], [c, -a]] exponentiates to

    cosh(w)*I + (sinh(w)/w)*X   when a^2 + bc > 0   (w = sqrt(a^2+bc))
    cos(w)*I  + (sin(w)/w)*X    when a^2 + bc < 0   (w = sqrt(-(a^2+bc)))
    I + X                       when a^2 + bc = 0

For a group element g with tr(g) >= 2 the logarithm is unique and the
one-parameter curve g^t admits the affine form in the modified time
lambda = sinh(t*w)/sinh(w):

    g^t = (a(lambda) - tr(g)/2 * lambda) * I + lambda * g,
    a(lambda) = sqrt(1 + (tr(g)^2/4 - 1) * lambda^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .numeric import DEFAULT_EPS

#: below this frequency the sinh ratios switch to their Taylor expansions
_SMALL_OMEGA = 1e-4


class UnsupportedBranchError(ValueError):
    """Raised for logarithm/curve requests outside the tr >= 2 branch."""


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 matrix over an exact or floating scalar.

    Group elements have determinant 1; tangent vectors have trace 0.
    Instances are immutable; arithmetic returns fresh matrices.
    """

    x: object
    y: object
    z: object
    w: object

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1, 0, 0, 1)

    @staticmethod
    def zero() -> "Mat2":
        return Mat2(0, 0, 0, 0)

    def entries(self) -> tuple:
        return (self.x, self.y, self.z, self.w)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.x + other.x, self.y + other.y,
                    self.z + other.z, self.w + other.w)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.x - other.x, self.y - other.y,
                    self.z - other.z, self.w - other.w)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.x, -self.y, -self.z, -self.w)

    def __mul__(self, other):
        if isinstance(other, Mat2):
            return Mat2(self.x * other.x + self.y * other.z,
                        self.x * other.y + self.y * other.w,
                        self.z * other.x + self.w * other.z,
                        self.z * other.y + self.w * other.w)
        return Mat2(self.x * other, self.y * other, self.z * other, self.w * other)

    def __rmul__(self, scalar):
        return Mat2(scalar * self.x, scalar * self.y, scalar * self.z, scalar * self.w)

    def trace(self):
        return self.x + self.w

    def det(self):
        return self.x * self.w - self.y * self.z

    def inverse(self) -> "Mat2":
        d = self.det()
        if d == 0:
            raise ZeroDivisionError("singular matrix")
        if d == 1:
            return Mat2(self.w, -self.y, -self.z, self.x)
        return Mat2(self.w / d, -self.y / d, -self.z / d, self.x / d)

    def transpose(self) -> "Mat2":
        return Mat2(self.x, self.z, self.y, self.w)

    def to_float(self) -> "Mat2":
        return Mat2(float(self.x), float(self.y), float(self.z), float(self.w))

    def fro_norm(self) -> float:
        return math.sqrt(float(self.x) ** 2 + float(self.y) ** 2
                         + float(self.z) ** 2 + float(self.w) ** 2)

    def fro_dist(self, other: "Mat2") -> float:
        return (self - other).to_float().fro_norm()

    def is_exact(self) -> bool:
        return all(isinstance(e, (int, Fraction)) for e in self.entries())


class TraceClass(Enum):
    HYPERBOLIC = "hyperbolic"    # tr > 2
    PARABOLIC = "parabolic"      # tr = 2
    ELLIPTIC = "elliptic"        # -2 < tr < 2
    BOUNDARY = "boundary"        # tr = -2
    NONPOSITIVE = "nonpositive"  # tr < -2


def trace_class(trace, eps: float = DEFAULT_EPS) -> TraceClass:
    """Classify a group element by its trace, with eps slack for floats."""
    t = float(trace)
    if abs(t - 2.0) <= eps:
        return TraceClass.PARABOLIC
    if abs(t + 2.0) <= eps:
        return TraceClass.BOUNDARY
    if t > 2.0:
        return TraceClass.HYPERBOLIC
    if t < -2.0:
        return TraceClass.NONPOSITIVE
    return TraceClass.ELLIPTIC


@dataclass(frozen=True)
class LogDirection:
    """A logarithm: traceless X, its frequency omega and branch tag."""

    X: Mat2
    omega: float
    branch: str  # 'hyperbolic' | 'parabolic' | 'elliptic'


@dataclass(frozen=True)
class Curve:
    """One-parameter connecting curve t -> exp(t * direction.X) on [0, 1]."""

    target: Mat2
    direction: LogDirection

    interval: tuple = (0.0, 1.0)

    def at(self, t: float) -> Mat2:
        return power_t(self.target, t)


@dataclass(frozen=True)
class ModifiedTime:
    """Modified time lambda with its a(lambda) and the trace that ties them.

    Satisfies a(lambda)^2 - (trace^2/4 - 1)*lambda^2 = 1 to 1e-12.
    """

    lam: float
    a_lam: float
    trace: float

    @staticmethod
    def from_time(t: float, trace: float) -> "ModifiedTime":
        tr = float(trace)
        if tr < 2.0:
            raise UnsupportedBranchError(f"trace {tr} < 2: no principal modified time")
        omega = math.acosh(tr / 2.0)
        lam = modified_time(t, omega)
        return ModifiedTime(lam, a_of_lambda(lam, tr), tr)

    def residual(self) -> float:
        return abs(self.a_lam ** 2 - (self.trace ** 2 / 4.0 - 1.0) * self.lam ** 2 - 1.0)


def _sinhc(x: float) -> float:
    """sinh(x)/x, via a 5-term Taylor series for tiny x."""
    if abs(x) < _SMALL_OMEGA:
        x2 = x * x
        return 1.0 + x2 / 6.0 + x2 ** 2 / 120.0 + x2 ** 3 / 5040.0 + x2 ** 4 / 362880.0
    return math.sinh(x) / x


def modified_time(t: float, omega: float) -> float:
    """lambda = sinh(t*omega)/sinh(omega); the omega -> 0 limit is t."""
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    if omega < _SMALL_OMEGA:
        return t * _sinhc(t * omega) / _sinhc(omega)
    return math.sinh(t * omega) / math.sinh(omega)


def time_from_lambda(lam: float, omega: float) -> float:
    """Inverse of modified_time: t with sinh(t*omega) = lam*sinh(omega)."""
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    if omega < 1e-12:
        return lam
    return math.asinh(lam * math.sinh(omega)) / omega


def a_of_lambda(lam: float, trace: float) -> float:
    """a(lambda) = sqrt(1 + (trace^2/4 - 1) * lambda^2), for trace >= 2."""
    tr = float(trace)
    if tr < 2.0:
        raise UnsupportedBranchError(f"trace {tr} < 2")
    return math.sqrt(1.0 + (tr * tr / 4.0 - 1.0) * lam * lam)


def exp_sl2(X: Mat2, eps: float = DEFAULT_EPS) -> Mat2:
    """Closed-form exponential of a traceless 2x2 matrix (float result)."""
    Xf = X.to_float()
    if abs(Xf.trace()) > eps:
        raise ValueError(f"tangent matrix must be traceless, trace = {Xf.trace()}")
    disc = Xf.x * Xf.x + Xf.y * Xf.z
    g0 = Mat2.identity().to_float()
    if disc > 0:
        omega = math.sqrt(disc)
        return math.cosh(omega) * g0 + _sinhc(omega) * Xf
    if disc < 0:
        omega = math.sqrt(-disc)
        if omega < _SMALL_OMEGA:
            sc = 1.0 - omega ** 2 / 6.0 + omega ** 4 / 120.0
        else:
            sc = math.sin(omega) / omega
        return math.cos(omega) * g0 + sc * Xf
    return g0 + Xf


def log_sl2(g: Mat2, eps: float = DEFAULT_EPS) -> LogDirection:
    """Principal logarithm of g with tr(g) >= 2.

    For tr > 2: X = (omega/sinh(omega)) * (g - cosh(omega)*I) with
    cosh(omega) = tr(g)/2.  At tr = 2 the parabolic limit X = g - I is
    returned.  Anything with tr < 2 is rejected: the elliptic and negative
    branches have no unique logarithm here.
    """
    gf = g.to_float()
    tr = gf.trace()
    if tr < 2.0 - eps:
        raise UnsupportedBranchError(
            f"trace {tr} < 2: elliptic/negative-trace elements are outside "
            "the principal logarithm branch")
    g0 = Mat2.identity().to_float()
    if tr <= 2.0 + eps:
        return LogDirection(gf - g0, 0.0, "parabolic")
    omega = math.acosh(tr / 2.0)
    X = (1.0 / _sinhc(omega)) * (gf - math.cosh(omega) * g0)
    return LogDirection(X, omega, "hyperbolic")


def power_t(g: Mat2, t: float, eps: float = DEFAULT_EPS) -> Mat2:
    """g^t = exp(t*log g) for tr(g) >= 2, in closed form.

    Equals (cosh(t*w) - lambda*cosh(w))*I + lambda*g with
    lambda = sinh(t*w)/sinh(w); the tr = 2 limit is (1-t)*I + t*g.
    """
    gf = g.to_float()
    tr = gf.trace()
    if tr < 2.0 - eps:
        raise UnsupportedBranchError(f"trace {tr} < 2: curve branch requires tr >= 2")
    g0 = Mat2.identity().to_float()
    if tr <= 2.0 + eps:
        return (1.0 - t) * g0 + t * gf
    omega = math.acosh(tr / 2.0)
    lam = modified_time(t, omega)
    return (math.cosh(t * omega) - lam * math.cosh(omega)) * g0 + lam * gf


def connecting_curve(g: Mat2, gamma: Mat2, eps: float = DEFAULT_EPS) -> Curve:
    """Build the connecting curve through g*gamma, sign-normalized.

    Since -I is a lattice element, a target with tr <= -2 is replaced by
    its negation before taking the logarithm.
    """
    target = g * gamma
    tr = float(target.to_float().trace())
    if tr <= -2.0 + eps:
        target = -target
        tr = -tr
    if tr < 2.0 - eps:
        raise UnsupportedBranchError(
            f"trace {tr} is elliptic: no principal connecting curve")
    direction = log_sl2(target, eps)
    return Curve(target.to_float(), direction)


def curve_point(g: Mat2, gamma: Mat2, t: float, eps: float = DEFAULT_EPS) -> Mat2:
    """Point (g*gamma)^t via the modified-time affine form.

    Agrees with power_t(g*gamma, t); exact inputs are evaluated in floats
    since lambda is irrational in general.
    """
    target = g * gamma
    tf = target.to_float()
    tr = tf.trace()
    if tr <= -2.0 + eps:
        tf = -tf
        tr = -tr
    if tr < 2.0 - eps:
        raise UnsupportedBranchError(f"trace {tr} < 2: curve branch requires tr >= 2")
    if tr <= 2.0 + eps:
        return (1.0 - t) * Mat2.identity().to_float() + t * tf
    mt = ModifiedTime.from_time(t, tr)
    g0 = Mat2.identity().to_float()
    return (mt.a_lam - 0.5 * tr * mt.lam) * g0 + mt.lam * tf
