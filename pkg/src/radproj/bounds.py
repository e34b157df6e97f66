"""Exact evaluation of the incidence bounds.

Every comparison here is decided exactly.  Rational bounds use ``Fraction``.
Bounds involving c = sqrt(r) are handled in the quadratic field Q(sqrt r):
an inequality between such numbers reduces to a sign test, and the sign of
x + y*sqrt(r) is settled by comparing x^2 with y^2 r.

For reports, ``sqrt_enclosure`` gives rational intervals at a chosen number
of bits; the interval verdict is escalated in precision until it agrees with
a definite answer, and the tests check that it never disagrees with the
exact one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .geom import counting_constants

__all__ = [
    "LargeEBound",
    "LargeTBound",
    "Surd",
    "eval_large_e",
    "eval_large_t",
    "sqrt_enclosure",
    "sqrt_le",
    "sqrt_lt",
]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Surd:
    """x + y*sqrt(r) with rational x, y and a fixed rational r > 0."""

    x: Fraction
    y: Fraction
    r: Fraction

    @classmethod
    def rational(cls, x, r) -> "Surd":
        return cls(Fraction(x), Fraction(0), Fraction(r))

    @classmethod
    def root(cls, r) -> "Surd":
        return cls(Fraction(0), Fraction(1), Fraction(r))

    def _lift(self, other) -> "Surd":
        if isinstance(other, Surd):
            if other.r != self.r:
                raise ValueError("surds over different radicands")
            return other
        return Surd(Fraction(other), Fraction(0), self.r)

    def __add__(self, other):
        o = self._lift(other)
        return Surd(self.x + o.x, self.y + o.y, self.r)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.x, -self.y, self.r)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Surd(self.x * o.x + self.y * o.y * self.r, self.x * o.y + self.y * o.x, self.r)

    __rmul__ = __mul__

    def sign(self) -> int:
        sx, sy = _sign(self.x), _sign(self.y)
        if sy == 0 or sx == sy:
            return sx if sx else sy
        if sx == 0:
            return sy
        return _sign(self.x * self.x - self.y * self.y * self.r) * sx

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        lo, hi = sqrt_enclosure(self.r, bits)
        a, b = self.x + self.y * lo, self.x + self.y * hi
        return (a, b) if a <= b else (b, a)

    def __float__(self):
        lo, hi = self.enclosure(80)
        return float((lo + hi) / 2)


def sqrt_enclosure(r, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(r) <= hi with hi - lo <= 2^-bits / den(r)."""
    r = Fraction(r)
    if r < 0:
        raise ValueError("square root of a negative number")
    n, m = r.numerator, r.denominator
    scale = 1 << bits
    s = isqrt(n * m * scale * scale)
    lo = Fraction(s, m * scale)
    if s * s == n * m * scale * scale:
        return lo, lo
    return lo, Fraction(s + 1, m * scale)


def sqrt_le(lhs, radicand) -> bool:
    """lhs <= sqrt(radicand), exactly."""
    lhs = Fraction(lhs)
    return lhs <= 0 or lhs * lhs <= Fraction(radicand)


def sqrt_lt(lhs, radicand) -> bool:
    """lhs < sqrt(radicand), exactly."""
    lhs = Fraction(lhs)
    if lhs < 0:
        return True
    return lhs * lhs < Fraction(radicand)


@dataclass(frozen=True)
class LargeEBound:
    """Parameters of the large-|E| bound: a = qbinom/|E|, b = M q^(1-d),
    C = 1/(1 - 2b + b^2 - a); the bound C qbinom M / |E| applies when C > 0."""

    q: int
    d: int
    size_e: int
    M: int
    a: Fraction
    b: Fraction
    C: Fraction | None
    bound: Fraction | None

    @property
    def applicable(self) -> bool:
        return self.bound is not None


def eval_large_e(q: int, d: int, size_e: int, M: int) -> LargeEBound:
    if size_e < 1:
        raise ValueError("|E| must be positive")
    if not isinstance(M, int) or M < 1:
        raise ValueError("M must be a positive integer")
    qb = counting_constants(q, d).qbinom
    a = Fraction(qb, size_e)
    b = Fraction(M, q ** (d - 1))
    den = 1 - 2 * b + b * b - a
    if den <= 0:
        return LargeEBound(q, d, size_e, M, a, b, None, None)
    C = 1 / den
    return LargeEBound(q, d, size_e, M, a, b, C, C * qb * M / size_e)


@dataclass(frozen=True)
class LargeTBound:
    """Parameters of the large-T bound: a = |E| q^(1-d), b = M/|E|,
    c = sqrt((1-b)/a) kept as its square ``c_sq``.

    ``applicable`` needs a > 0, b < 1, c > 1 and 1 - b - a c > 0.
    """

    q: int
    d: int
    size_e: int
    M: int
    a: Fraction
    b: Fraction
    c_sq: Fraction | None
    applicable: bool
    reason: str = ""

    @property
    def qbinom(self) -> int:
        return counting_constants(self.q, self.d).qbinom

    @property
    def c(self) -> Surd:
        return Surd.root(self.c_sq)

    @property
    def c_inv(self) -> Surd:
        # 1/sqrt(r) = sqrt(r)/r
        return Surd(Fraction(0), 1 / self.c_sq, self.c_sq)

    def denominator(self) -> Surd:
        """(1 - b - a c)^2 (1 - 1/c)^2; the bound is 2 qbinom over this."""
        u = 1 - self.b - self.a * self.c
        v = 1 - self.c_inv
        return u * u * v * v

    def admits(self, measured: int) -> bool:
        """measured < 2 (1-b-ac)^-2 (1-1/c)^-2 qbinom, decided exactly."""
        return (2 * self.qbinom - measured * self.denominator()).sign() > 0

    def enclosure(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        lo_c, hi_c = sqrt_enclosure(self.c_sq, bits)
        u_lo, u_hi = 1 - self.b - self.a * hi_c, 1 - self.b - self.a * lo_c
        v_lo, v_hi = 1 - 1 / lo_c if lo_c > 0 else Fraction(-1), 1 - 1 / hi_c
        if u_lo <= 0 or v_lo <= 0:
            return Fraction(0), Fraction(10**100)
        two_qb = 2 * self.qbinom
        return two_qb / (u_hi * u_hi * v_hi * v_hi), two_qb / (u_lo * u_lo * v_lo * v_lo)

    def verdict_at(self, measured: int, bits: int) -> bool | None:
        """Interval verdict for measured < bound; None when undecided."""
        lo, hi = self.enclosure(bits)
        if measured < lo:
            return True
        if measured >= hi:
            return False
        return None

    def verdict(self, measured: int, bits: int = 64, max_bits: int = 4096) -> bool:
        while bits <= max_bits:
            v = self.verdict_at(measured, bits)
            if v is not None:
                return v
            bits *= 2
        return self.admits(measured)

    def upper(self, bits: int = 64) -> float:
        return float(self.enclosure(bits)[1])


def eval_large_t(q: int, d: int, size_e: int, M: int) -> LargeTBound:
    if size_e < 1:
        return LargeTBound(q, d, size_e, M, Fraction(0), Fraction(0), None, False, "|E| = 0")
    if not isinstance(M, int) or M < 1:
        raise ValueError("M must be a positive integer")
    a = Fraction(size_e, q ** (d - 1))
    b = Fraction(M, size_e)
    if b >= 1:
        return LargeTBound(q, d, size_e, M, a, b, None, False, "b >= 1")
    c_sq = (1 - b) / a
    # c > 1 already forces 1 - b - ac > 0: (1-b)^2 > a(1-b) = (ac)^2
    if c_sq <= 1:
        return LargeTBound(q, d, size_e, M, a, b, c_sq, False, "(1-b)/a <= 1")
    return LargeTBound(q, d, size_e, M, a, b, c_sq, True)
