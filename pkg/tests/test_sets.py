import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padicbij.atlas import Invert, Translate, run_steps, run_steps_backward
from padicbij.sets import (SQ_LE, SQ_LT, Bound, Cell1D, Empty, LevelBox, Point, PolySet,
                           PresentedCell, Product, Space, Tagged, TaggedUnion, Union,
                           coset_split, dimension_of, finite_points, member, normalize_cell)

from conftest import PRIMES, P, nonzero_rationals
from oracles import nth_powers_of_units, unit_part_mod, vq


def cell(p, c=0, lam=1, n=1, a1=None, a2=None, sq1=SQ_LE, sq2=SQ_LE, level=0):
    return Cell1D(P(p, c), P(p, lam), n,
                  None if a1 is None else P(p, a1), None if a2 is None else P(p, a2),
                  sq1 if a1 is not None else "none", sq2 if a2 is not None else "none", level)


def direct_cell_member(p, c, lam, n, lo, hi, level, x):
    """The defining conditions evaluated on rationals."""
    y = Fraction(x) - c
    if lam == 0:
        return y == 0
    if y == 0 or not lo <= vq(y, p) <= hi:
        return False
    q = y / lam
    if vq(q, p) % n:
        return False
    M = max(level, 2 * vq(n, p) + 1 if n > 1 else 0, 1)
    u = unit_part_mod(q, p, M)
    if level and u % p ** level != 1 % p ** level:
        return False
    return n == 1 or u in nth_powers_of_units(p, n, M)


def test_cell_membership_values():
    C = cell(5, a1=1, a2=25)
    assert member(C, (P(5, 5),))
    assert not member(C, (P(5, Fraction(1, 5)),))


def test_presented_cell_membership_value():
    E = PresentedCell(2, 1, upper=Bound(P(5, 1), (1,)))
    assert not member(E, (P(5, 1), P(5, 30)))
    assert member(E, (P(5, 1), P(5, 26)))


@given(st.sampled_from(PRIMES), st.integers(-5, 5), st.sampled_from([1, 2, 3, 6]),
       st.integers(1, 4), st.integers(-2, 1), st.integers(0, 3), st.integers(0, 2),
       nonzero_rationals)
def test_cell_membership_matches_direct_evaluation(p, c, lam, n, lo, width, level, x):
    C = cell(p, c=c, lam=lam, n=n, a1=Fraction(p) ** lo, a2=Fraction(p) ** (lo + width),
             level=level)
    assert member(C, (P(p, x),)) == direct_cell_member(p, c, lam, n, lo, lo + width, level, x)


@given(st.sampled_from(PRIMES), nonzero_rationals)
def test_strict_bounds_tighten_the_window(p, x):
    C = cell(p, a1=1, a2=p ** 2, sq1=SQ_LT, sq2=SQ_LT)
    assert member(C, (P(p, x),)) == (vq(x, p) == 1)


def test_singleton_cell():
    C = cell(5, c=3, lam=0, a1=1)
    assert member(C, (P(5, 3),)) and not member(C, (P(5, 8),))
    assert dimension_of(C) == 0
    assert finite_points(C) == [(P(5, 3),)]


@pytest.mark.parametrize("S, d", [
    (Point((P(5, 1),)), 0), (LevelBox(3, 2), 3), (cell(5, lam=0), 0), (Space(2), 2),
    (Empty(2), -1), (cell(5, a1=25, a2=1), -1), (cell(5, n=2, a1=5, a2=5), -1),
    (Product(LevelBox(1, 1), Point((P(5, 2),))), 1),
    (TaggedUnion(((0, Point((P(5, 1),))), (1, LevelBox(2, 1)))), 2),
    (PolySet(2, 1, ((0, 1, 0), (0, 0, 1), (-3, 1, 1), (1, -1, 0), (1, 0, -1))), -1),
])
def test_dimension_values(S, d):
    assert dimension_of(S) == d


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-2, 2), st.integers(-2, 2)),
                min_size=1, max_size=4))
def test_polytope_emptiness_matches_grid_search(rows):
    P2 = PolySet(2, 1, tuple(rows) + ((4, 1, 0), (4, -1, 0), (4, 0, 1), (4, 0, -1)))
    grid = any(P2.holds(v) for v in itertools.product(range(-4, 5), repeat=2))
    assert (dimension_of(P2) == 2) == grid


def test_finite_points_of_unions_and_products():
    A = TaggedUnion(((0, Point((P(5, 1),))), (1, Point((P(5, 2),)))))
    assert finite_points(A) == [(Tagged(0, (P(5, 1),)),), (Tagged(1, (P(5, 2),)),)]
    B = Product(Union((Point((P(3, 1),)), Point((P(3, 2),)))), Point((P(3, 0),)))
    assert finite_points(B) == [(P(3, 1), P(3, 0)), (P(3, 2), P(3, 0))]
    with pytest.raises(ValueError):
        finite_points(LevelBox(1, 1))


def test_normalize_translates_the_centre():
    C = cell(5, c=3, a1=1, a2=25)
    [(D, pipe, sign)] = normalize_cell(C)
    assert D.c == 0 and sign == 1
    assert pipe.steps == (Translate(P(5, 3)),)


def test_normalize_inverts_upper_bounded_cells():
    C = cell(5, lam=2, a2=Fraction(1, 25))
    [(D, pipe, sign)] = normalize_cell(C)
    assert pipe.steps == (Invert(),) and sign == -1
    assert D.a1 == 25 and D.a2 is None and D.lam == Fraction(1, 2)


def test_normalize_keeps_normal_cells():
    C = cell(5, a1=1, a2=25)
    [(D, pipe, _)] = normalize_cell(C)
    assert D == C and pipe.steps == ()


@given(st.sampled_from(PRIMES), st.sampled_from([0, 2]), st.sampled_from([None, 1]),
       st.sampled_from([None, 25]), nonzero_rationals)
def test_normalized_cells_transport_membership(p, c, a1, a2, x):
    C = cell(p, c=c, lam=1, n=2, a1=a1, a2=a2)
    pieces = normalize_cell(C)
    y = P(p, x)
    for D, pipe, _ in pieces:
        if member(D, (y,)):
            assert member(C, run_steps(pipe.steps, (y,)))
    # every point of C comes from exactly one piece
    if member(C, (y,)):
        assert sum(member(D, _back(pipe, y)) for D, pipe, _ in pieces) == 1


def _back(pipe, y):
    try:
        return run_steps_backward(pipe.steps, (y,))
    except ZeroDivisionError:
        return (y,)


def _residue_partition(S, pieces, p, M):
    """Each unit/valuation class mod p^M of S lies in exactly one piece."""
    for r in range(1, p ** M):
        x = (P(p, r),)
        hits = sum(member(T, x) for _, T in pieces)
        assert hits == (1 if member(S, x) else 0), r


def test_coset_split_units():
    S = cell(5, a1=1, a2=1)
    pieces = coset_split(S, 1, 1)
    assert [g for g, _ in pieces] == [1, 2, 3, 4]
    _residue_partition(S, pieces, 5, 2)


def test_coset_split_units_of_z2():
    pieces = coset_split(cell(2, a1=1), 1, 1)
    assert [g for g, _ in pieces] == [1]


def test_coset_split_squares():
    S = cell(5, n=2, a1=1)
    pieces = coset_split(S, 2, 1)
    for g, _ in pieces:
        assert g.val % 2 == 0 and g.unit_residue(1) in (1, 4)
    _residue_partition(S, pieces, 5, 3)


def test_coset_split_rejects_low_levels():
    with pytest.raises(ValueError):
        coset_split(cell(2, n=2, a1=1), 2, 1)
