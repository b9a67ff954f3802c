from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padicbij.atlas import (Block, CoordinateMap, Inverse, MonomialTwist,
                            Scale, Translate, run_steps, run_steps_backward, simplify)
from padicbij.rectilinear import (FormError, _finish, reduce_leading_exponent, rect_E,
                                  rectilinearize, split_E1_E2, split_nonpositive)
from padicbij.sets import LevelBox, Point, PolySet, PresentedCell, Space, arity, member
from padicbij.verify import (ResidueWindow, check_bijection, check_partition,
                             check_valuation_law)

from atlas_catalog import cell
from conftest import P
from corpus import RECT, bound, form, window
from paths import recording


def _suite(X, parts, p, W=None, samples=200):
    W = W or window(p, arity(X))
    r = check_partition(X, [q.part for q in parts], W, p)
    assert r.passed, r.line()
    for i, q in enumerate(parts):
        b = check_bijection(q.pipeline, samples, 0, f"part{i}", p=p)
        assert b.passed, b.line()
        v = check_valuation_law(q, 50, 0, p=p)
        assert v.passed, v.line()
        assert all(f.e == 1 for f in q.forms)


def _E(l, k, c, nu):
    rows = tuple((0,) + tuple(1 if j == i else 0 for j in range(l + 1)) for i in range(l + 1))
    return PolySet(l + 1, k, rows + ((c, *nu, -1),))


def test_units_case_one_parts():
    # the unit circle at p=5: per class, the centre and p-1 boxes
    parts = rectilinearize(cell(5, lo=0, hi=0), (), 5)
    assert len(parts) == 20
    assert sum(q.box.l == 0 for q in parts) == 4
    _suite(cell(5, lo=0, hi=0), parts, 5)


def test_squares_case_two_value():
    parts = rectilinearize(cell(5, n=2, lo=0), (), 5)
    hits = [q for q in parts if member(q.part, (P(5, 36),))]
    assert len(hits) == 1
    y = run_steps_backward(hits[0].pipeline.steps, (P(5, 36),))
    assert run_steps(hits[0].pipeline.steps, y) == (P(5, 36),)


def test_singleton_is_one_point_part():
    parts = rectilinearize(Point((P(3, 7),)), (), 3)
    assert len(parts) == 1 and parts[0].box.l == 0
    assert run_steps(parts[0].pipeline.steps, ()) == (P(3, 7),)


def test_level_box_is_its_own_part():
    parts = rectilinearize(LevelBox(2, 1), (), 5)
    assert len(parts) == 1 and parts[0].pipeline.steps == ()


def test_empty_has_no_parts():
    from padicbij.sets import Empty
    assert rectilinearize(Empty(2), (), 3) == []


def test_prime_required():
    with pytest.raises(ValueError):
        rectilinearize(Space(1))


def test_form_with_fractional_valuation_rejected():
    # v(x)/2 is not an integer on R^(1)
    with pytest.raises(FormError):
        rectilinearize(LevelBox(1, 1), (form(3, 2, 1, [1]),), 3)


def test_form_length_checked():
    with pytest.raises(ValueError):
        rectilinearize(LevelBox(2, 1), (form(3, 1, 1, [1]),), 3)


def test_squares_form_halves():
    X = cell(3, n=2, lo=0, hi=2, level=1)
    parts = rectilinearize(X, (form(3, 2, 9, [2]),), 3)
    _suite(X, parts, 3)


@pytest.mark.parametrize("l, k, c, nu", [(1, 1, 2, (0,)), (1, 1, 1, (-1,)),
                                          (2, 1, 1, (-1, 0))])
def test_split_nonpositive_fibres(l, k, c, nu):
    pieces = split_nonpositive(l, k, c, nu, 3)
    # one annulus per s in 0..c, each a point plus p-1 boxes over the base
    assert pieces
    X = _E(l, k, c, nu)
    _suite(X, _finish(X, pieces, (), 3), 3, ResidueWindow(4, 0, 3, 0) if l == 1 else None)


@pytest.mark.parametrize("l, c, nu", [(1, 0, (1,)), (1, 1, (1,)), (2, 1, (1, -1))])
def test_split_e1_e2(l, c, nu):
    X = _E(l, 1, c, nu)
    _suite(X, _finish(X, split_E1_E2(l, 1, c, nu, 2), (), 2), 2)


def test_split_e1_e2_needs_leading_one():
    with pytest.raises(ValueError):
        split_E1_E2(1, 1, 0, (2,), 3)


def test_reduce_leading_exponent():
    X = _E(1, 1, 1, (2,))
    pieces = reduce_leading_exponent(1, 1, 1, (2,), 3)
    _suite(X, _finish(X, pieces, (), 3), 3)
    with pytest.raises(ValueError):
        reduce_leading_exponent(1, 1, 0, (1,), 3)


def test_rect_E_dispatch_permutes_positive_exponent():
    X = _E(2, 1, 0, (0, 1))
    _suite(X, _finish(X, rect_E(2, 1, 0, (0, 1), 2), (), 2), 2)


def test_valuation_law_on_presented_cell():
    X = PresentedCell(2, 1, upper=bound(5, 1, [1]))
    parts = rectilinearize(X, (form(5, 1, 5, [1, 1]), form(5, 1, 1, [0, -1])), 5)
    for i, q in enumerate(parts):
        r = check_valuation_law(q, 30, i, p=5)
        assert r.passed, r.line()


@pytest.mark.parametrize("name", sorted(RECT))
def test_corpus_reaches_declared_paths(name):
    p, X, forms, want = RECT[name]
    with recording() as seen:
        parts = rectilinearize(X, forms, p)
    assert want <= seen
    assert all(f.e == 1 for q in parts for f in q.forms)


def test_simplify_drops_identities_and_double_inverses():
    t = Translate(P(5, 3))
    ident = MonomialTwist(0, P(5, 1), (1, 0))
    steps = (ident, Inverse((Inverse((t,)),)), CoordinateMap((Block(1, 1, ()),)))
    assert simplify(steps) == (t,)


@given(st.integers(-50, 50), st.integers(1, 50))
def test_simplify_preserves_map(a, b):
    x = (P(5, Fraction(a, b)), P(5, 2))
    steps = (MonomialTwist(1, P(5, 1), (0, 1)),
             CoordinateMap((Block(1, 1, (Inverse((Inverse((Scale(P(5, 5)),)),)),)),
                            Block(1, 1, ()))),
             CoordinateMap((Block(1, 1, ()),
                            Block(1, 1, (Inverse((Translate(P(5, 1)), Inverse(()))),)))))
    small = simplify(steps)
    assert len(small) < len(steps)
    assert run_steps(small, x) == run_steps(steps, x)
    y = run_steps(steps, x)
    assert run_steps_backward(small, y) == x

