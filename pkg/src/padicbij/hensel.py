"""Hensel lifting, n-th power tests, level sets and n-th roots on level sets."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .padic import (PAdic, PrecisionError, as_padic,
                    height_digits, rational_reconstruct, scaled, vp_int)


class HypothesisError(ValueError):
    """Inputs violate the hypotheses of Hensel's lemma."""


@dataclass(frozen=True)
class Polynomial:
    """Single-variable polynomial with coefficients in R, lowest degree first."""

    coeffs: tuple[PAdic, ...]

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("degree must be at least 1")
        for c in self.coeffs:
            if not c.is_exact:
                raise ValueError("coefficients must be exact")
            if c.val < 0:
                raise ValueError("coefficients must lie in R")

    @classmethod
    def of(cls, p: int, coeffs) -> "Polynomial":
        return cls(tuple(as_padic(p, c) for c in coeffs))

    @property
    def p(self) -> int:
        return self.coeffs[0].p

    def derivative(self) -> "Polynomial | None":
        d = [c * i for i, c in enumerate(self.coeffs)][1:]
        if len(d) < 2:
            return _Constant(d[0])
        return Polynomial(tuple(d))

    def __call__(self, x: PAdic) -> PAdic:
        acc = PAdic(self.p, 0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def int_coeffs(self, m: int) -> list[int]:
        out = []
        for c in self.coeffs:
            q = c.fraction()
            out.append(q.numerator * pow(q.denominator, -1, m) % m)
        return out


@dataclass(frozen=True)
class _Constant:
    value: PAdic

    def __call__(self, x):
        return self.value


def _eval_mod(coeffs: list[int], x: int, m: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % m
    return acc


def _newton(coeffs: list[int], alpha: int, p: int, target: int, e: int) -> int:
    """Lift alpha to a root modulo p^target of the integer polynomial."""
    width = target + 2 * e + 2
    m = p ** width
    dcoeffs = [c * i % m for i, c in enumerate(coeffs)][1:]
    a = alpha % m
    while True:
        f = _eval_mod(coeffs, a, m)
        d = _eval_mod(dcoeffs, a, m)
        ed = vp_int(d, p)
        if f == 0 or vp_int(f, p) >= target + ed:
            return a % p ** target
        step = (f // p ** ed) * pow(d // p ** ed, -1, m) % m
        a = (a - step) % m


def hensel_lift(f: Polynomial, alpha: PAdic, e: int, target_digits: int) -> PAdic:
    """The unique root of f congruent to alpha mod p^(e+1), known mod p^target_digits.

    Exact when the root is a rational number recoverable from its residue.
    """
    p = f.p
    alpha = as_padic(p, alpha)
    if not alpha.is_exact or alpha.val < 0:
        raise HypothesisError("alpha must be an exact element of R")
    fa = f(alpha)
    if fa.val < 2 * e + 1:
        raise HypothesisError(f"v(f(alpha)) = {fa.val} < 2e+1 = {2 * e + 1}")
    dfa = f.derivative()(alpha)
    if dfa.val > e:
        raise HypothesisError(f"v(f'(alpha)) = {dfa.val} > e = {e}")
    if fa.is_zero:
        return alpha
    target = max(target_digits, e + 1)
    m = p ** (target + 2 * e + 2)
    root = _newton(f.int_coeffs(m), alpha.residue(target + 2 * e + 2), p, target, e)
    exact = _try_exact_root(f, root, p ** target)
    if exact is not None and (exact - alpha).val >= e + 1:
        return exact
    if root == 0:
        raise PrecisionError("root is divisible by p^target; raise target_digits")
    v = vp_int(root, p)
    return PAdic.truncated(p, v, root // p ** v, target - v)


def _try_exact_root(f: Polynomial, residue: int, m: int) -> PAdic | None:
    for cand in (residue, residue - m):
        x = PAdic(f.p, cand)
        if f(x).is_zero:
            return x
    q = rational_reconstruct(residue, m)
    if q is not None:
        x = PAdic(f.p, q)
        if f(x).is_zero:
            return x
    return None


@lru_cache(maxsize=None)
def unit_power_residues(p: int, n: int) -> frozenset[int]:
    """Residues mod p^(2v(n)+1) of n-th powers of units (built once per (p, n))."""
    m = p ** (2 * vp_int(n, p) + 1)
    return frozenset(pow(a, n, m) for a in range(1, m) if a % p)


def power_margin(p: int, n: int) -> int:
    """Unit digits needed to decide membership in P_n."""
    return 2 * vp_int(n, p) + 1 if n > 1 else 0


def is_nth_power(x: PAdic, n: int) -> bool:
    """Whether x lies in P_n (x nonzero)."""
    if x.is_zero:
        raise ValueError("0 is not in P_n; handle lambda = 0 as the set {0}")
    if n < 1:
        raise ValueError("n must be positive")
    if x.val % n:
        return False
    if n == 1:
        return True
    k = 2 * vp_int(n, x.p) + 1
    return x.unit_residue(k) in unit_power_residues(x.p, n)


def in_level(x: PAdic, k: int) -> bool:
    """Whether x lies in K^(k): nonzero with expansion 1, 0, ..., 0 (k digits)."""
    if x.is_zero:
        return False
    if k <= 0:
        return True
    return x.unit_residue(k) == 1


def in_level_set(x: PAdic, k: int, base=None) -> bool:
    """Membership in base^(k); base is a set descriptor, default R."""
    if x.is_zero:
        return False
    if base is None:
        if x.val < 0:
            return False
    else:
        from .sets import member
        if not member(base, (x,)):
            return False
    return in_level(x, k)


def in_power_level(x: PAdic, n: int, k: int) -> bool:
    """Membership in P_n^(k) = P_n intersected with K^(k)."""
    return in_level(x, k) and is_nth_power(x, n)


def nth_root_in_level(y: PAdic, n: int, k: int, precision: int = 24) -> PAdic:
    """The unique x in K^(k) with x^n = y, for y in P_n^(k + v(n)) and k > v(n)."""
    p = y.p
    e = vp_int(n, p)
    if k <= e:
        raise ValueError(f"level k={k} must exceed v(n)={e}")
    if y.is_zero or y.val % n or not in_level(y, k + e):
        raise ValueError(f"{y!r} is not in P_{n}^({k + e})")
    q = y.val // n
    if n == 1:
        return y
    if y.is_exact:
        w = y.fraction() / Fraction(p) ** y.val
        width = max(precision, 2 * (height_digits(w, p) // n + 1) + 8)
        m = p ** (width + e)
        wres = w.numerator * pow(w.denominator, -1, m) % m
        z = _newton([-wres, *([0] * (n - 1)), 1], 1, p, width, e)
        cand = _exact_nth_root(w, n, z, p ** width)
        if cand is not None:
            return scaled(p, cand, q)
        z %= p ** precision
        return PAdic.truncated(p, q, z, precision)
    r = y.prec
    if r - e < 1:
        raise PrecisionError("not enough digits to extract the root")
    wres = y.unit_residue(r)
    z = _newton([-wres, *([0] * (n - 1)), 1], 1, p, r - e, e)
    return PAdic.truncated(p, q, z, r - e)


def _exact_nth_root(w: Fraction, n: int, z: int, m: int) -> Fraction | None:
    cands = [Fraction(z), Fraction(z - m)]
    rr = rational_reconstruct(z, m)
    if rr is not None:
        cands.append(rr)
    for c in cands:
        if c ** n == w:
            return c
    return None


def nth_power_oracle(x: int, n: int, p: int, M: int) -> bool:
    """Brute force: does some y mod p^M satisfy y^n = x mod p^M?"""
    m = p ** M
    x %= m
    return any(pow(y, n, m) == x for y in range(m))
