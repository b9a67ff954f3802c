from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padicbij.atlas import (BACKWARD, FORWARD, Block, CoordinateMap, DomainError, HotelShift,
                            Interleave, Invert, IsoPipeline,
                            MonomialTwist, PairToK, PowerCoset, Scale, Translate, Untag,
                            ValuationInterleave, apply, apply_pipeline, box_to_space,
                            disjoint_union_realize, hotel, k_iso, merge_tree, union_merge)
from padicbij.sets import LevelBox, Point, Tagged, member
from padicbij.verify import (ResidueWindow, check_bijection, check_transport, residue_census,
                             residue_grid)

from atlas_catalog import cell, catalogue
from conftest import PRIMES, P, nonzero_rationals, rationals
from oracles import vq


def test_translate_value():
    assert apply(Translate(P(5, 3)), FORWARD, (P(5, 2),)) == (P(5, 5),)


def test_pair_to_k_value():
    assert apply(PairToK(), FORWARD, (Tagged(1, (P(5, 2),)),)) == (P(5, Fraction(1, 10)),)


def test_valuation_interleave_values():
    assert apply(ValuationInterleave(1), FORWARD, (P(5, 2),)) == (P(5, 10),)
    assert apply(Interleave(), BACKWARD, (P(5, 50),)) == (Tagged(0, (P(5, 10),)),)
    assert apply(ValuationInterleave(0), FORWARD, (P(5, 10),)) == (P(5, 50),)


def test_pipeline_values():
    assert apply_pipeline(IsoPipeline(None, None, ()), FORWARD, (P(5, 7),)) == (P(5, 7),)
    pipe = IsoPipeline(None, None, (Translate(P(5, 3)), Invert()))
    assert apply_pipeline(pipe, FORWARD, (P(5, 2),)) == (P(5, Fraction(1, 5)),)


@pytest.mark.parametrize("x, y", [(0, 1), (25, 125), (2, 2), (1, 5)])
def test_hotel_values(x, y):
    assert hotel(FORWARD, (P(5, x),)) == (P(5, y),)
    assert hotel(BACKWARD, (P(5, y),)) == (P(5, x),)


@pytest.mark.parametrize("x, y", [(1, 25), (Fraction(1, 5), 5), (3, 3)])
def test_k_iso_values(x, y):
    assert k_iso(FORWARD, (P(5, x),)) == (P(5, y),)
    assert k_iso(BACKWARD, (P(5, y),)) == (P(5, x),)


def test_twist_and_power_values():
    assert apply(MonomialTwist(0, P(5, 1), (0, 1)), FORWARD, (P(5, 6), P(5, 30))) == \
        (P(5, 180), P(5, 30))
    assert apply(MonomialTwist(0, P(5, 1), (0, 1)), BACKWARD, (P(5, 180), P(5, 30))) == \
        (P(5, 6), P(5, 30))
    step = CoordinateMap((Block(1, 1, ()), Block(1, 1, (PowerCoset(P(3, 1), 2, 1),))))
    assert apply(step, FORWARD, (P(3, 1), P(3, 4))) == (P(3, 1), P(3, 16))


def test_domain_errors():
    with pytest.raises(DomainError):
        apply(Invert(), FORWARD, (P(5, 0),))
    with pytest.raises(DomainError):
        apply(PowerCoset(P(5, 1), 2, 1), FORWARD, (P(5, 2),))
    with pytest.raises(DomainError):
        apply(HotelShift(), BACKWARD, (P(5, 0),))
    with pytest.raises(DomainError):
        apply(Untag((cell(5, lo=0, hi=0),)), FORWARD, (Tagged(0, (P(5, 5),)),))
    with pytest.raises(DomainError) as err:
        apply_pipeline(IsoPipeline(None, None, (Translate(P(5, 1)), Invert())), FORWARD,
                       (P(5, -1),))
    assert "step 1 (Invert)" in str(err.value)


@given(st.sampled_from(PRIMES), rationals)
def test_k_iso_round_trip(p, x):
    y = k_iso(FORWARD, (P(p, x),))
    assert not y[0].is_zero and y[0].val >= 0
    assert k_iso(BACKWARD, y) == (P(p, x),)


@given(st.sampled_from(PRIMES), nonzero_rationals, st.integers(0, 1))
def test_interleave_parity_law(p, x, t):
    (y,) = apply(ValuationInterleave(t), FORWARD, (P(p, x),))
    assert y.val == 2 * vq(x, p) + t
    assert apply(Interleave(), BACKWARD, (y,)) == (Tagged(t, (P(p, x),)),)


def test_interleave_images_partition_the_target():
    # every grid point of K minus 0 has exactly one preimage tag
    for (y,) in residue_grid(cell(5, lo=-3, hi=3), 5, ResidueWindow(3, 0, 2, 0)):
        if y.is_zero:
            continue
        tags = []
        for t in (0, 1):
            try:
                apply(ValuationInterleave(t), BACKWARD, (y,))
                tags.append(t)
            except DomainError:
                pass
        assert tags == [y.val % 2]


def test_merge_of_two_level_copies_keeps_the_census():
    """Two copies of R^(1) merge onto R^(1); the merged images of a grid of
    both copies have the same (valuation, unit mod 5^3) census as R^(1)."""
    p = 5
    shape = LevelBox(1, 1)
    pipe = union_merge([(shape, ()), (shape, ())], shape)
    units = [u for u in range(1, p ** 3) if u % p == 1]
    src = [Tagged(t, (P(p, u * p ** s),)) for t in (0, 1) for s in range(3) for u in units]
    images = [apply_pipeline(pipe, FORWARD, (x,))[0] for x in src]
    assert all(member(shape, (y,)) for y in images)
    census = residue_census(images, p, 3)
    assert set(census) == {(s, u) for s in range(6) for u in units}
    assert all(c == 1 for c in census.values())


def test_four_copies_land_in_the_four_valuation_classes():
    steps = merge_tree(4)
    for tag in range(4):
        for s in range(3):
            (y,) = apply_pipeline(IsoPipeline(None, None, steps), FORWARD,
                                  (Tagged(tag, (P(5, 5 ** s * 6),)),))
            assert y.val % 4 == tag


def test_single_copy_merge_is_the_identity():
    pipe = union_merge([(LevelBox(1, 1), ())], LevelBox(1, 1))
    assert apply_pipeline(pipe, FORWARD, (Tagged(0, (P(5, 6),)),)) == (P(5, 6),)


def test_disjoint_union_of_two_points():
    X = Point((P(5, 0),))
    Xp, Yp, px, py = disjoint_union_realize(X, X, 5)
    (a,) = apply_pipeline(px, FORWARD, (P(5, 0),))
    (b,) = apply_pipeline(py, FORWARD, (P(5, 0),))
    assert a != b and a.val % 2 == 0 and b.val % 2 == 1


def test_disjoint_union_of_two_copies_of_r():
    R = catalogue(5)["HotelShift"].source
    Xp, Yp, px, py = disjoint_union_realize(R, R, 5)
    for (x,) in residue_grid(R, 5, ResidueWindow(3, 0, 2, 0)):
        (a,) = apply_pipeline(px, FORWARD, (x,))
        (b,) = apply_pipeline(py, FORWARD, (x,))
        assert a.val % 2 == 0 and b.val % 2 == 1
        assert member(Xp, (a,)) and not member(Yp, (a,))


def test_disjoint_union_pads_the_smaller_set():
    X, Y = LevelBox(2, 1), Point((P(5, 3),))
    Xp, Yp, px, py = disjoint_union_realize(X, Y, 5)
    y = apply_pipeline(py, FORWARD, (P(5, 3),))
    assert len(y) == 2 and y[1] == 0


def test_box_to_space_round_trip():
    assert check_bijection(box_to_space(5, 2, 1), 300, seed=1).passed


@pytest.mark.parametrize("p", (2, 3))
@pytest.mark.parametrize("name", sorted(catalogue(5)))
def test_step_catalogue_at_small_primes(p, name):
    P_ = catalogue(p)[name]
    assert check_bijection(P_, 200, seed=p, name=name, p=p).passed
    assert check_transport(P_, ResidueWindow(3, 0, 2, 0), p, name).passed


def test_corrupted_pipeline_fails():
    class Skewed(Scale):
        def backward(self, x, prec):
            return Scale(P(5, 3)).backward(x, prec)

    R = catalogue(5)["HotelShift"].source
    bad = IsoPipeline(R, R, (Skewed(P(5, 2)),))
    r = check_bijection(bad, 100, seed=0, name="corrupt", p=5)
    assert not r.passed

