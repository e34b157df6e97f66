"""Finite fields F_q, q = p^e, with elements encoded as integers in [0, q).

The base-p digits of an element index are the coefficients of its polynomial
representative, constant term first.  Index 0 is zero, index 1 is one, and the
prime subfield is exactly the indices ``0..p-1``.

Scalar operations take and return plain ``int``.  The ``*_arr`` variants work
elementwise on numpy integer arrays and are what the enumeration code uses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "FieldError",
    "FieldSpec",
    "MAX_ORDER",
    "TABLE_ORDER",
    "field_arith",
    "field_create",
    "is_prime",
    "subfield_elements",
]

MAX_ORDER = 1 << 20
TABLE_ORDER = 256


class FieldError(ValueError):
    """Invalid field parameters or an arithmetic domain error."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# -- polynomial helpers over F_p (coefficient lists, constant term first) --

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m."""
    a = _trim(list(a))
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        lead = a[-1]
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * mc) % p
        _trim(a)
    return a


def _monic_polys(p: int, degree: int):
    for low in itertools.product(range(p), repeat=degree):
        yield list(low) + [1]


def _is_irreducible(f: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(f)//2."""
    n = len(f) - 1
    for k in range(1, n // 2 + 1):
        for g in _monic_polys(p, k):
            if not _poly_mod(f, g, p):
                return False
    return True


def _smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    # product() varies the last slot fastest, so iterating over
    # (c0, ..., c_{e-1}) gives low-degree-first lexicographic order.
    for f in _monic_polys(p, e):
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError(f"no irreducible polynomial of degree {e} over F_{p}")


@dataclass(frozen=True)
class FieldSpec:
    """The field F_{p^e} with a fixed modulus.

    ``modulus`` holds the e+1 coefficients of the monic modulus, constant
    term first.  For prime fields it is ``(0, 1)`` and plays no role.
    """

    p: int
    e: int
    modulus: tuple[int, ...]
    q: int = field(init=False)
    _add: np.ndarray | None = field(init=False, repr=False, compare=False)
    _mul: np.ndarray | None = field(init=False, repr=False, compare=False)
    _neg: np.ndarray = field(init=False, repr=False, compare=False)
    _inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"characteristic {self.p} is not prime")
        if self.e < 1:
            raise FieldError(f"extension degree must be >= 1, got {self.e}")
        q = self.p**self.e
        if q > MAX_ORDER:
            raise FieldError(f"field order {self.p}^{self.e} = {q} exceeds cap {MAX_ORDER}")
        if len(self.modulus) != self.e + 1 or self.modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree e")
        if self.e > 1 and not _is_irreducible(list(self.modulus), self.p):
            raise FieldError(f"modulus {self.modulus} is reducible over F_{self.p}")
        object.__setattr__(self, "q", q)
        self._build_tables()

    # -- construction of lookup tables --

    def _build_tables(self):
        q = self.q
        elems = np.arange(q, dtype=np.int64)
        if q <= TABLE_ORDER:
            a, b = np.meshgrid(elems, elems, indexing="ij")
            add = self._add_raw(a, b)
            mul = self._mul_raw(a, b)
            object.__setattr__(self, "_add", add)
            object.__setattr__(self, "_mul", mul)
        else:
            object.__setattr__(self, "_add", None)
            object.__setattr__(self, "_mul", None)
        neg = self._neg_raw(elems)
        inv = np.zeros(q, dtype=np.int64)
        nz = elems[1:]
        # a^(q-2) = a^{-1} for a != 0
        inv[1:] = self._pow_raw(nz, q - 2)
        object.__setattr__(self, "_neg", neg)
        object.__setattr__(self, "_inv", inv)

    def _digits(self, a: np.ndarray) -> np.ndarray:
        out = np.empty(a.shape + (self.e,), dtype=np.int64)
        rest = a.copy()
        for i in range(self.e):
            out[..., i] = rest % self.p
            rest //= self.p
        return out

    def _undigits(self, dg: np.ndarray) -> np.ndarray:
        out = np.zeros(dg.shape[:-1], dtype=np.int64)
        for i in reversed(range(self.e)):
            out = out * self.p + dg[..., i]
        return out

    def _add_raw(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        return self._undigits((self._digits(a) + self._digits(b)) % self.p)

    def _neg_raw(self, a):
        if self.e == 1:
            return (-a) % self.p
        return self._undigits((-self._digits(a)) % self.p)

    def _mul_raw(self, a, b):
        p, e = self.p, self.e
        if e == 1:
            return (a * b) % p
        da, db = self._digits(a), self._digits(b)
        prod = np.zeros(da.shape[:-1] + (2 * e - 1,), dtype=np.int64)
        for i in range(e):
            for j in range(e):
                prod[..., i + j] += da[..., i] * db[..., j]
        prod %= p
        m = self.modulus
        for top in range(2 * e - 2, e - 1, -1):
            lead = prod[..., top].copy()
            for k in range(e + 1):
                prod[..., top - e + k] -= lead * m[k]
            prod %= p
        return self._undigits(prod[..., :e])

    def _pow_raw(self, a, n: int):
        result = np.ones_like(a)
        base = a.copy()
        while n:
            if n & 1:
                result = self._mul_raw(result, base)
            base = self._mul_raw(base, base)
            n >>= 1
        return result

    # -- public arithmetic --

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    @property
    def label(self) -> str:
        return f"{self.p}^{self.e}"

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element of F_{self.q}")
        return a

    def add_arr(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self._add is not None:
            return self._add[a, b]
        return self._add_raw(*np.broadcast_arrays(a, b))

    def sub_arr(self, a, b) -> np.ndarray:
        return self.add_arr(a, self._neg[np.asarray(b, dtype=np.int64)])

    def mul_arr(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self._mul is not None:
            return self._mul[a, b]
        return self._mul_raw(*np.broadcast_arrays(a, b))

    def neg_arr(self, a) -> np.ndarray:
        return self._neg[np.asarray(a, dtype=np.int64)]

    def inv_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self._inv[a]

    def add(self, a: int, b: int) -> int:
        return int(self.add_arr(self.check(a), self.check(b)))

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_arr(self.check(a), self.check(b)))

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_arr(self.check(a), self.check(b)))

    def neg(self, a: int) -> int:
        return int(self._neg[self.check(a)])

    def inv(self, a: int) -> int:
        if self.check(a) == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return int(self._inv[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def elements(self) -> range:
        return range(self.q)

    def to_json(self) -> dict:
        return {"field": self.label, "modulus": list(self.modulus)}


@lru_cache(maxsize=None)
def field_create(p: int, e: int = 1) -> FieldSpec:
    """Return F_{p^e} with the low-degree-first lexicographically smallest
    monic irreducible modulus.  Cached, so repeated calls share tables."""
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if not isinstance(e, int) or e < 1:
        raise FieldError(f"extension degree must be >= 1, got {e}")
    if p**e > MAX_ORDER:
        raise FieldError(f"field order {p}^{e} exceeds cap {MAX_ORDER}")
    modulus = (0, 1) if e == 1 else _smallest_irreducible(p, e)
    return FieldSpec(p, e, modulus)


_OPS = {
    "add": FieldSpec.add,
    "sub": FieldSpec.sub,
    "mul": FieldSpec.mul,
    "div": FieldSpec.div,
}


def field_arith(spec: FieldSpec, op: str, a: int, b: int | None = None) -> int:
    """Dispatch one arithmetic operation by name."""
    if op == "neg":
        return spec.neg(a)
    if op == "inv":
        return spec.inv(a)
    if op not in _OPS:
        raise FieldError(f"unknown operation {op!r}")
    if b is None:
        raise FieldError(f"{op} needs two operands")
    return _OPS[op](spec, a, b)


def subfield_elements(spec: FieldSpec) -> frozenset[int]:
    """The prime subfield F_p: the constant polynomials, indices 0..p-1."""
    return frozenset(range(spec.p))
