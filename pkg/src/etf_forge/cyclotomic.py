"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Elements are stored in the power basis 1, z, ..., z^(phi(m)-1) after reduction
modulo the m-th cyclotomic polynomial.  Internally the coefficients are kept as
integer numerators over one positive common denominator, which keeps the hot
multiplication loop in plain integer arithmetic.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence

from .errors import OrderMismatchError

__all__ = [
    "Cyclotomic",
    "cyclotomic_polynomial",
    "euler_phi",
    "root_of_unity",
    "lift",
    "is_real",
    "is_purely_imaginary",
    "approx",
]


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, constant term first.

    Computed by exact long division of x^m - 1 by the product of Phi_d over
    the proper divisors d of m.
    """
    if m < 1:
        raise ValueError(f"cyclotomic order must be positive, got {m}")
    num = [-1] + [0] * (m - 1) + [1]
    for d in _divisors(m)[:-1]:
        num = _exact_divide(num, cyclotomic_polynomial(d))
    return tuple(num)


def _exact_divide(num: list[int], den: Sequence[int]) -> list[int]:
    # den is monic
    num = list(num)
    dn = len(den) - 1
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            quot[i - dn] = c
            for j, dj in enumerate(den):
                num[i - dn + j] -= c * dj
    if any(num[:dn]):
        raise ArithmeticError("polynomial division left a remainder")
    return quot


@lru_cache(maxsize=None)
def euler_phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


def _reduce(m: int, poly: list[int]) -> list[int]:
    """Reduce an integer polynomial modulo x^m - 1 and then modulo Phi_m."""
    if len(poly) > m:
        folded = [0] * m
        for i, c in enumerate(poly):
            if c:
                folded[i % m] += c
        poly = folded
    phi_poly = cyclotomic_polynomial(m)
    deg = len(phi_poly) - 1
    if len(poly) <= deg:
        return poly + [0] * (deg - len(poly))
    poly = list(poly)
    for i in range(len(poly) - 1, deg - 1, -1):
        c = poly[i]
        if c:
            base = i - deg
            for j in range(deg):
                if phi_poly[j]:
                    poly[base + j] -= c * phi_poly[j]
            poly[i] = 0
    return poly[:deg]


class Cyclotomic:
    """An element of Q(zeta_m) in canonical reduced form.

    >>> a = root_of_unity(7, 1) + root_of_unity(7, 2) + root_of_unity(7, 4)
    >>> a * a.conj()
    Cyclotomic(7, [2, 0, 0, 0, 0, 0])
    """

    __slots__ = ("m", "_num", "_den", "_hash")

    def __init__(self, m: int, coeffs: Iterable[Rational | int] = ()):
        if m < 1:
            raise ValueError(f"cyclotomic order must be positive, got {m}")
        fracs = [Fraction(c) for c in coeffs]
        den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        num = [f.numerator * (den // f.denominator) for f in fracs]
        self._set(m, _reduce(m, num), den)

    @classmethod
    def _raw(cls, m: int, num: list[int], den: int = 1) -> Cyclotomic:
        obj = cls.__new__(cls)
        obj._set(m, _reduce(m, num), den)
        return obj

    def _set(self, m: int, num: list[int], den: int) -> None:
        if den < 0:
            num = [-c for c in num]
            den = -den
        g = math.gcd(den, *num)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        if not any(num):
            den = 1
        self.m = m
        self._num = tuple(num)
        self._den = den
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, m: int) -> Cyclotomic:
        return cls._raw(m, [], 1)

    @classmethod
    def one(cls, m: int) -> Cyclotomic:
        return cls._raw(m, [1], 1)

    @classmethod
    def rational(cls, m: int, value: Rational | int) -> Cyclotomic:
        value = Fraction(value)
        return cls._raw(m, [value.numerator], value.denominator)

    # -- accessors --------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._num)

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self._num[0], self._den)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> Cyclotomic | None:
        if isinstance(other, Cyclotomic):
            if other.m != self.m:
                raise OrderMismatchError(
                    f"orders differ ({self.m} vs {other.m}); lift both to a common order first"
                )
            return other
        if isinstance(other, (int, Rational)):
            return Cyclotomic.rational(self.m, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        d1, d2 = self._den, other._den
        if d1 == d2:
            num = [a + b for a, b in zip(self._num, other._num)]
            return Cyclotomic._raw(self.m, num, d1)
        num = [a * d2 + b * d1 for a, b in zip(self._num, other._num)]
        return Cyclotomic._raw(self.m, num, d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> Cyclotomic:
        return Cyclotomic._raw(self.m, [-a for a in self._num], self._den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._num, other._num
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic._raw(self.m, prod, self._den * other._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int) -> Cyclotomic:
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic.one(self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def galois(self, k: int) -> Cyclotomic:
        """Apply the automorphism zeta -> zeta^k (k coprime to m)."""
        if math.gcd(k, self.m) != 1:
            raise ValueError(f"{k} is not a unit modulo {self.m}")
        m = self.m
        poly = [0] * m
        for i, c in enumerate(self._num):
            if c:
                poly[(i * k) % m] += c
        return Cyclotomic._raw(m, poly, self._den)

    def conj(self) -> Cyclotomic:
        return self.galois(-1 % self.m) if self.m > 2 else self

    def norm(self) -> Fraction:
        """Field norm down to Q: the product of all Galois conjugates."""
        return self._norm_and_cofactor()[0]

    def _norm_and_cofactor(self) -> tuple[Fraction, Cyclotomic]:
        m = self.m
        cof = Cyclotomic.one(m)
        for k in range(2, m + 1):
            if math.gcd(k, m) == 1 and k % m != 1:
                cof = cof * self.galois(k)
        return (self * cof).to_fraction(), cof

    def inverse(self) -> Cyclotomic:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_m)")
        if self.is_rational():
            return Cyclotomic.rational(self.m, 1 / self.to_fraction())
        n, cof = self._norm_and_cofactor()
        return cof * (1 / n)

    # -- comparison / hashing ---------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Cyclotomic):
            return self.m == other.m and self._den == other._den and self._num == other._num
        if isinstance(other, (int, Rational)):
            return self.is_rational() and self.to_fraction() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self._num[0], self._den))
            else:
                self._hash = hash((self.m, self._num, self._den))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        cs = [str(c) for c in self.coeffs]
        return f"Cyclotomic({self.m}, [{', '.join(cs)}])"

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        body = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return f"{body} [m={self.m}]"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "c": [[str(c.numerator), str(c.denominator)] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> Cyclotomic:
        m = int(data["m"])
        coeffs = [Fraction(int(n), int(d)) for n, d in data["c"]]
        if len(coeffs) != euler_phi(m):
            raise ValueError(f"expected {euler_phi(m)} coefficients for m={m}, got {len(coeffs)}")
        z = cls(m, coeffs)
        if z.coeffs != tuple(coeffs):
            raise ValueError("coefficients are not in canonical form")
        return z


@lru_cache(maxsize=4096)
def root_of_unity(m: int, k: int) -> Cyclotomic:
    """zeta_m ** (k mod m)."""
    if m < 1:
        raise ValueError(f"cyclotomic order must be positive, got {m}")
    poly = [0] * m
    poly[k % m] = 1
    return Cyclotomic._raw(m, poly, 1)


def lift(z: Cyclotomic, m: int) -> Cyclotomic:
    """Embed z from Q(zeta_n) into Q(zeta_m) for n dividing m."""
    if m % z.m:
        raise OrderMismatchError(f"cannot lift order {z.m} into order {m}")
    step = m // z.m
    poly = [0] * m
    for i, c in enumerate(z.numerators):
        poly[i * step] += c
    return Cyclotomic._raw(m, poly, z.denominator)


def is_real(z: Cyclotomic) -> bool:
    return z == z.conj()


def is_purely_imaginary(z: Cyclotomic) -> bool:
    return (z + z.conj()).is_zero()


def approx(z: Cyclotomic) -> complex:
    """Floating-point value under zeta_m = exp(2 pi i / m); for reports only."""
    w = cmath.exp(2j * math.pi / z.m)
    return sum(float(c) * w**i for i, c in enumerate(z.coeffs))
