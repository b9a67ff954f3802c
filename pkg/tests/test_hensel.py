import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padicbij.hensel import (HypothesisError, Polynomial, hensel_lift, in_level_set,
                             in_power_level, is_nth_power, nth_root_in_level, power_margin)
from padicbij.padic import PAdic, PrecisionError

from conftest import PRIMES, P
from oracles import hensel_instance, hensel_roots, nth_powers_of_units, unit_part_mod, vq


@pytest.mark.parametrize("p, coeffs, alpha, e, mod, expected", [
    (5, [-6, 0, 1], 1, 0, 25, 16),
    (2, [-17, 0, 1], 7, 1, 4, 3),
])
def test_lift_values(p, coeffs, alpha, e, mod, expected):
    x = hensel_lift(Polynomial.of(p, coeffs), P(p, alpha), e, 20)
    assert x.residue(vq(mod, p)) == expected


def test_linear_root_is_exact():
    x = hensel_lift(Polynomial.of(7, [-4, 1]), P(7, 4), 0, 20)
    assert x.is_exact and x == 4


def test_hypotheses_are_checked():
    with pytest.raises(HypothesisError):
        hensel_lift(Polynomial.of(5, [-2, 0, 1]), P(5, 1), 0, 10)   # f(1) = -1 is a unit
    with pytest.raises(HypothesisError):
        hensel_lift(Polynomial.of(2, [-1, 0, 1]), P(2, 1), 0, 10)   # f'(1) = 2, v = 1 > e


@pytest.mark.parametrize("p", PRIMES)
def test_lift_is_the_unique_root_in_its_class(p):
    rng = random.Random(f"hensel-{p}")
    for _ in range(15):
        coeffs, alpha, e = hensel_instance(p, rng)
        N = e + 4
        roots = hensel_roots(coeffs, alpha, e, p, N)
        assert len(roots) == 1
        x = hensel_lift(Polynomial.of(p, coeffs), P(p, alpha), e, N + 2)
        assert x.residue(N) == roots[0]


@pytest.mark.parametrize("p, x, n, expected", [(5, 6, 2, True), (5, 5, 2, False),
                                               (5, 2, 2, False), (2, 17, 2, True),
                                               (2, 5, 2, False), (3, 10, 3, True)])
def test_nth_power_values(p, x, n, expected):
    assert is_nth_power(P(p, x), n) is expected


@given(st.sampled_from(PRIMES), st.integers(1, 5 ** 6).filter(bool), st.integers(1, 4))
def test_nth_power_matches_enumeration(p, x, n):
    v = vq(x, p)
    M = 2 * vq(n, p) + 1 if n > 1 else 1
    expected = v % n == 0 and unit_part_mod(x, p, M) in nth_powers_of_units(p, n, M)
    assert is_nth_power(P(p, x), n) is expected


@pytest.mark.parametrize("p, x, k, expected", [(5, 26, 2, True), (5, 26, 3, False),
                                               (2, 6, 2, False), (7, 1, 9, True)])
def test_level_set_values(p, x, k, expected):
    assert in_level_set(P(p, x), k) is expected


def test_level_set_outside_R():
    assert not in_level_set(P(5, Fraction(1, 5)), 1)


@pytest.mark.parametrize("p, n, k, y, root", [(3, 2, 1, 16, 4), (2, 2, 2, 9, -3),
                                              (5, 3, 1, 1, 1), (2, 4, 3, 1, 1)])
def test_root_values(p, n, k, y, root):
    assert nth_root_in_level(P(p, y), n, k) == root


def test_root_needs_level_above_valuation_of_n():
    with pytest.raises(ValueError):
        nth_root_in_level(P(2, 1), 2, 1)


@given(st.sampled_from((2, 3, 5)), st.sampled_from((2, 3, 4)),
       st.integers(0, 5 ** 8), st.integers(-3, 3))
def test_root_inverts_power_on_level_sets(p, n, t, s):
    k = vq(n, p) + 1
    x = PAdic(p, (1 + p ** k * t) * Fraction(p) ** s)
    y = x ** n
    assert in_power_level(y, n, k + vq(n, p))
    assert nth_root_in_level(y, n, k) == x


def test_truncated_root_carries_its_precision():
    y = PAdic.from_digits(5, [1, 0, 3, 2, 4, 1], 0)
    r = nth_root_in_level(y, 2, 1)
    assert r.prec == 6
    assert (r * r).unit_residue(6) == y.unit_residue(6)
    with pytest.raises(PrecisionError):
        nth_root_in_level(PAdic.from_digits(2, [1, 0], 0), 2, 2)


@pytest.mark.parametrize("p, n, margin", [(5, 1, 0), (5, 2, 1), (2, 2, 3), (3, 9, 5)])
def test_power_margin(p, n, margin):
    assert power_margin(p, n) == margin
