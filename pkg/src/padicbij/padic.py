"""Arithmetic in Q_p with exact rational values and digit-truncated values.

A value is either *exact* (a rational number) or *truncated*: ``p^s * u``
where only the unit ``u`` modulo ``p^prec`` is known.  Truncated results never
claim more digits than their operands justify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import gmpy2

_mpq = gmpy2.mpq

INF = math.inf

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
          67, 71, 73, 79, 83, 89, 97)


class PrecisionError(ArithmeticError):
    """Raised when the known digits of a value run out."""


class IndeterminateError(PrecisionError):
    """A comparison or membership test cannot be decided at the known precision."""


def vp_int(n: int, p: int) -> int:
    if n == 0:
        return INF
    return int(gmpy2.remove(gmpy2.mpz(n), p)[1])


@dataclass(frozen=True)
class Context:
    """The prime p (so K = Q_p and the uniformizer is p) and a working precision.

    ``precision`` is the number of significant digits carried by inexact results
    such as Hensel roots.
    """

    p: int
    precision: int = 24

    def __post_init__(self):
        if self.p not in PRIMES:
            raise ValueError(f"p must be a prime between 2 and 97, got {self.p}")
        if self.precision < 12:
            raise ValueError("precision must be at least 12 digits")

    @property
    def uniformizer(self) -> "PAdic":
        return PAdic(self.p, self.p)

    def __call__(self, value) -> "PAdic":
        return as_padic(self.p, value)


Number = Union[int, Fraction, "PAdic"]


class PAdic:
    """An element of Q_p, exact or truncated."""

    __slots__ = ("p", "_q", "_val", "_unit", "_prec")

    def __init__(self, p: int, value: int | Fraction | str = 0):
        self.p = p
        # exact values are held as gmpy2 rationals for speed
        self._q = value if type(value) is _mpq else _mpq(value)
        self._val = None
        self._unit = None
        self._prec = None

    @classmethod
    def truncated(cls, p: int, val: int, unit: int, prec: int) -> "PAdic":
        """``p^val * unit`` with ``unit`` known modulo ``p^prec``."""
        if prec < 1:
            raise PrecisionError("a truncated value needs at least one known digit")
        unit %= p ** prec
        if unit % p == 0:
            raise ValueError("unit part must not be divisible by p")
        obj = cls.__new__(cls)
        obj.p = p
        obj._q = None
        obj._val = val
        obj._unit = unit
        obj._prec = prec
        return obj

    @classmethod
    def from_digits(cls, p: int, digits: list[int], start: int) -> "PAdic":
        if not digits or digits[0] == 0:
            raise ValueError("leading digit must be nonzero")
        if any(not 0 <= d < p for d in digits):
            raise ValueError(f"digits must lie in 0..{p - 1}")
        unit = sum(d * p ** i for i, d in enumerate(digits))
        return cls.truncated(p, start, unit, len(digits))

    # -- structure -------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self._q is not None

    @property
    def is_zero(self) -> bool:
        return self._q is not None and self._q == 0

    @property
    def val(self):
        if self._val is None:
            q = self._q
            if q == 0:
                return INF
            self._val = (int(gmpy2.remove(q.numerator, self.p)[1])
                         - int(gmpy2.remove(q.denominator, self.p)[1]))
        return self._val

    @property
    def prec(self) -> int | None:
        """Relative precision (known digits); None for exact values."""
        return self._prec

    @property
    def absprec(self):
        if self._q is not None:
            return INF
        return self._val + self._prec

    def fraction(self) -> Fraction:
        if self._q is None:
            raise PrecisionError("truncated value has no exact rational form")
        return Fraction(int(self._q.numerator), int(self._q.denominator))

    def unit_residue(self, k: int) -> int:
        """The unit part ``x / p^v(x)`` modulo ``p^k``."""
        if self.is_zero:
            raise ValueError("zero has no unit part")
        m = self.p ** k
        if self._q is None:
            if k > self._prec:
                raise IndeterminateError(
                    f"need {k} digits, only {self._prec} known")
            return self._unit % m
        v = self.val
        q = self._q
        num, den = q.numerator, q.denominator
        if v > 0:
            num //= self.p ** v
        elif v < 0:
            den //= self.p ** (-v)
        return int(num * gmpy2.invert(den, m) % m)

    def residue(self, k: int) -> int:
        """The value modulo ``p^k`` for x in R (as an integer in 0..p^k-1)."""
        if self.is_zero:
            return 0
        v = self.val
        if v < 0:
            raise ValueError("value is not in R")
        if v >= k:
            if self.absprec < k:
                raise IndeterminateError("value not known modulo p^%d" % k)
            return 0
        if self.absprec < k:
            raise IndeterminateError("value not known modulo p^%d" % k)
        return self.unit_residue(k - v) * self.p ** v % self.p ** k

    def approx(self) -> Fraction:
        """A rational representative (the value itself when exact)."""
        if self._q is not None:
            return self.fraction()
        return Fraction(self._unit) * Fraction(self.p) ** self._val

    # -- arithmetic ------------------------------------------------------

    def shift(self, n: int) -> "PAdic":
        """``self * p^n``, keeping the known valuation."""
        if self._q is None:
            return PAdic.truncated(self.p, self._val + n, self._unit, self._prec)
        out = PAdic(self.p, self._q * _mpq(self.p) ** n)
        if self._val is not None and self._q != 0:
            out._val = self._val + n
        return out

    def is_pi_power(self) -> bool:
        """Whether the value is exactly p^v (False for zero and truncated values)."""
        q = self._q
        if q is None or q == 0:
            return False
        num, den = q.numerator, q.denominator
        if den == 1:
            return num == self.p ** self.val
        return num == 1 and den == self.p ** (-self.val)

    def _coerce(self, other) -> "PAdic":
        if isinstance(other, PAdic):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        if isinstance(other, (int, Fraction)):
            return PAdic(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._q is not None and other._q is not None:
            return PAdic(self.p, self._q + other._q)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p = self.p
        a = min(self.absprec, other.absprec)
        w = min(self.val, other.val)
        m = p ** (a - w)
        s = (self._shifted(w, m) + other._shifted(w, m)) % m
        if s == 0:
            raise PrecisionError("total cancellation below known precision")
        t = vp_int(s, p)
        return PAdic.truncated(p, w + t, s // p ** t, a - w - t)

    __radd__ = __add__

    def _shifted(self, w: int, m: int) -> int:
        """``self / p^w`` modulo m, for w <= val(self)."""
        shift = self.val - w
        if self._q is None:
            return self._unit * self.p ** shift % m
        return self.unit_residue(_digits_for(m, self.p)) * self.p ** shift % m

    def __neg__(self):
        if self._q is not None:
            return PAdic(self.p, -self._q)
        return PAdic.truncated(self.p, self._val, -self._unit, self._prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if type(other) is PAdic and self._q is not None and other._q is not None \
                and self.p == other.p:
            return PAdic(self.p, self._q * other._q)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._q is not None and other._q is not None:
            return PAdic(self.p, self._q * other._q)
        if self.is_zero or other.is_zero:
            return PAdic(self.p, 0)
        r = min(x._prec for x in (self, other) if x._q is None)
        u = self.unit_residue(r) * other.unit_residue(r)
        return PAdic.truncated(self.p, self.val + other.val, u, r)

    __rmul__ = __mul__

    def inverse(self) -> "PAdic":
        if self.is_zero:
            raise ZeroDivisionError("p-adic division by zero")
        if self._q is not None:
            return PAdic(self.p, 1 / self._q)
        m = self.p ** self._prec
        return PAdic.truncated(self.p, -self._val, pow(self._unit, -1, m), self._prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if self._q is not None:
            if n < 0 and self._q == 0:
                raise ZeroDivisionError("p-adic division by zero")
            return PAdic(self.p, self._q ** n)
        base = self if n >= 0 else self.inverse()
        m = self.p ** self._prec
        return PAdic.truncated(self.p, base._val * abs(n),
                               pow(base._unit, abs(n), m), self._prec)

    # -- comparison ------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._q is not None and self._q == other
        if not isinstance(other, PAdic):
            return NotImplemented
        if self.p != other.p:
            return False
        if self._q is not None or other._q is not None:
            return self._q == other._q
        return (self._val, self._unit, self._prec) == (other._val, other._unit, other._prec)

    def __hash__(self):
        if self._q is not None:
            return hash((self.p, self._q))
        return hash((self.p, self._val, self._unit, self._prec))

    def __repr__(self):
        return format_padic(self)


def scaled(p: int, u, s: int) -> PAdic:
    """The exact value u * p^s (u an integer or rational)."""
    return PAdic(p, _mpq(u) * _mpq(p) ** s)


def _digits_for(m: int, p: int) -> int:
    k = 0
    while p ** k < m:
        k += 1
    return k


def as_padic(p: int, x) -> PAdic:
    if isinstance(x, PAdic):
        if x.p != p:
            raise ValueError("mixing different primes")
        return x
    return PAdic(p, x)


def format_padic(x: PAdic) -> str:
    if x.is_exact:
        q = x.fraction()
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return "[" + ",".join(map(str, expand_digits(x, x.prec))) + f"]@{x.val}"


# -- the operations of the core module --------------------------------------

def val(x: PAdic):
    return x.val


def ac(x: PAdic) -> int:
    """Leading digit of the expansion."""
    if x.is_zero:
        raise ValueError("ac(0) is undefined")
    return x.unit_residue(1)


def expand_digits(x: PAdic, count: int) -> list[int]:
    """Digits a_v, ..., a_{v+count-1} of x = sum a_i p^i."""
    if x.is_zero:
        return [0] * count
    if not x.is_exact and count > x.prec:
        raise PrecisionError(f"only {x.prec} digits known, {count} requested")
    u = x.unit_residue(count)
    out = []
    for _ in range(count):
        u, d = divmod(u, x.p)
        out.append(d)
    return out


def eq_upto(x: PAdic, y: PAdic, k: int) -> bool:
    """Whether v(x - y) >= min(v(x), v(y)) + k."""
    if x.is_exact and y.is_exact:
        if x == y:
            return True
        return (x - y).val >= min(x.val, y.val) + k
    need = min(x.val, y.val) + k
    try:
        d = x - y
    except PrecisionError:
        # difference is O(p^a) with a the common absolute precision
        if min(x.absprec, y.absprec) >= need:
            return True
        raise IndeterminateError("values agree on all known digits but fewer than requested")
    if d.is_zero:
        return True
    if d.val >= need:
        return True
    return False


def agree(x: PAdic, y: PAdic, digits: int | None = None) -> bool:
    """Semantic equality: exact equality, or agreement on ``digits`` leading digits
    (default: every digit both values know)."""
    if x.is_exact and y.is_exact:
        return x == y
    if x.is_zero or y.is_zero:
        return False
    if digits is None:
        digits = min(a.absprec for a in (x, y)) - min(x.val, y.val)
    try:
        return eq_upto(x, y, digits)
    except IndeterminateError:
        return False


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """Find r/s = a mod m with |r|, s <= sqrt(m/2), or None."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def height_digits(q: Fraction, p: int) -> int:
    """Digits needed to write max(|num|, |den|) in base p (rounded up)."""
    h = max(abs(q.numerator), q.denominator)
    return max(1, math.ceil(h.bit_length() / math.log2(p)))
