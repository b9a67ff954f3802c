import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padicbij.atlas import Invert, IsoPipeline, Scale, Translate
from padicbij.rectilinear import RectPart, rectilinearize
from padicbij.sets import (LevelBox, MonomialForm, Point, PresentedCell, Space, Union,
                           member)
from padicbij.verify import (ResidueWindow, WindowError, check_bijection, check_finite,
                             check_partition, check_transport, check_valuation_law,
                             class_residues, enumerate_residues, residue_census,
                             sample_point)

from atlas_catalog import ball, cell
from conftest import PRIMES, P
from corpus import bound
from oracles import vp


def test_window_validation():
    with pytest.raises(ValueError):
        ResidueWindow(3, 2, 1)
    with pytest.raises(ValueError):
        ResidueWindow(2, 0, 2)


@given(st.sampled_from(PRIMES), st.integers(1, 4), st.data())
def test_class_residues_against_brute_force(p, M, data):
    hi = data.draw(st.integers(0, M - 1))
    W = ResidueWindow(M, 0, hi)
    want = [r for r in range(1, p ** M) if vp(r, p) <= hi]
    assert class_residues(p, W) == want


def test_enumerate_units():
    W = ResidueWindow(2, 0, 1)
    units = enumerate_residues(cell(5, lo=0, hi=0), W, 5)
    assert len(units) == 20
    assert len(enumerate_residues(cell(5, lo=1, hi=1), W, 5)) == 4


def test_undecided_class_raises():
    # v(x) = 3 is not decided by residues mod 5^2
    with pytest.raises(WindowError):
        enumerate_residues(cell(5, lo=3, hi=3, c=1), ResidueWindow(2, 0, 1), 5)


def test_partition_detects_overlap_and_gap():
    W = ResidueWindow(3, 0, 2)
    X = cell(3, lo=0)
    good = [cell(3, lo=0, hi=0), cell(3, lo=1)]
    assert check_partition(X, good, W, 3).passed
    overlap = check_partition(X, [cell(3, lo=0, hi=1), cell(3, lo=1)], W, 3)
    assert not overlap.passed and "overlap" in overlap.detail
    gap = check_partition(X, [cell(3, lo=0, hi=0), cell(3, lo=2)], W, 3)
    assert not gap.passed and "missing" in gap.detail
    extra = check_partition(X, good + [Point((P(3, 0),))], W, 3)
    assert not extra.passed


def test_bijection_detects_wrong_target():
    ok = IsoPipeline(cell(5, lo=1), cell(5, hi=-1), (Invert(),))
    assert check_bijection(ok, 200, 0, p=5).passed
    bad = IsoPipeline(cell(5, lo=1), cell(5, hi=-2), (Invert(),))
    r = check_bijection(bad, 200, 0, p=5)
    assert not r.passed and "not in codomain" in r.detail


def test_bijection_detects_partial_map():
    # 1/x is undefined at the centre of the source ball
    bad = IsoPipeline(ball(5, 0, 1), cell(5, hi=-1), (Invert(),))
    assert not check_bijection(bad, 200, 0, p=5).passed


def test_bijection_is_deterministic():
    pipe = IsoPipeline(Space(1), Space(1), (Scale(P(3, 9)),))
    a = check_bijection(pipe, 100, 7, "x", p=3)
    b = check_bijection(pipe, 100, 7, "x", p=3)
    assert a.line() == b.line() and a.checked == 200


def test_transport():
    W = ResidueWindow(3, 0, 2)
    ok = IsoPipeline(cell(5, lo=1), cell(5, c=3, lo=1), (Translate(P(5, 3)),))
    assert check_transport(ok, W, 5).passed
    bad = IsoPipeline(cell(5, lo=1), cell(5, c=2, lo=1), (Translate(P(5, 3)),))
    assert not check_transport(bad, W, 5).passed


def test_valuation_law_rejects_stale_forms():
    X = PresentedCell(2, 1, upper=bound(3, 1, [1]))
    f = MonomialForm(1, P(3, 3), (1, 1))
    parts = rectilinearize(X, (f,), 3)
    assert all(check_valuation_law(q, 20, 0, p=3).passed for q in parts)
    q = next(q for q in parts if q.box.l > 0)
    shifted = MonomialForm(1, P(3, 9) * q.forms[0].beta, q.forms[0].mu)
    broken = RectPart(q.part, q.box, q.pipeline, (shifted,), q.source_forms, q.centers)
    assert not check_valuation_law(broken, 20, 0, p=3).passed
    wide = RectPart(q.part, q.box, q.pipeline, (MonomialForm(2, P(3, 1), q.forms[0].mu),),
                    q.source_forms, q.centers)
    r = check_valuation_law(wide, 20, 0, p=3)
    assert not r.passed and "e=2" in r.detail


def test_finite_detects_missing_and_foreign_points():
    W = ResidueWindow(2, 0, 1)
    X = Union((Point((P(5, 0),)), Point((P(5, 7),))))
    assert check_finite(X, [(P(5, 0),), (P(5, 7),)], W, 5).passed
    assert not check_finite(X, [(P(5, 0),)], W, 5).passed
    assert not check_finite(X, [(P(5, 0),), (P(5, 7),), (P(5, 1),)], W, 5).passed
    assert not check_finite(X, [(P(5, 0),), (P(5, 0),), (P(5, 7),)], W, 5).passed


def test_census_counts_classes():
    pts = [P(3, x) for x in (1, 4, 2, 3, 6, Fraction(1, 3))]
    c = residue_census(pts, 3, 1)
    assert c == {(0, 1): 2, (0, 2): 1, (1, 1): 1, (1, 2): 1, (-1, 1): 1}


@pytest.mark.parametrize("S", [cell(7, n=3, lo=1), LevelBox(2, 2), Space(2),
                               PresentedCell(2, 1, upper=bound(2, 1, [1, ])),
                               ball(3, 2, 1)])
def test_samples_are_members(S):
    p = 7 if S == cell(7, n=3, lo=1) else 2 if isinstance(S, PresentedCell) else 3
    rng = random.Random(1)
    for _ in range(100):
        assert member(S, sample_point(S, p, rng))
