"""Bijections X -> K^d with d = dim X, and point lists for finite X."""

from __future__ import annotations

from dataclasses import dataclass

from .atlas import (K_ISO_STEPS, Block, CaseSplit, Constant, CoordinateMap, Interleave,
                    Inverse, IsoPipeline, Peel, PointAbsorb, Tag, TagGather, TagMap,
                    level_to_rnz)
from .rectilinear import descriptor_prime, rectilinearize
from .sets import Point, SetDescriptor, Space, dimension_of, finite_points


@dataclass(frozen=True)
class FinitePoints:
    points: tuple[tuple, ...]


def merge2(l: int, m: int, p: int) -> tuple:
    """Steps from (0, a in K^l) u (1, b in K^m), l <= m, m >= 1, onto K^m."""
    if not 0 <= l <= m or m < 1:
        raise ValueError(f"cannot merge K^{l} into K^{m}")
    if l == 0:
        return (PointAbsorb(m, p),)
    if m == 1:
        return (TagMap(((0, K_ISO_STEPS), (1, K_ISO_STEPS))), Interleave(), Inverse(K_ISO_STEPS))
    # A u B = K x (A' u B'), recurse on the last m - 1 coordinates
    return (Peel(), CoordinateMap((Block(1, 1, ()), Block(1, m - 1, merge2(l - 1, m - 1, p)))))


def merge_parts(A: IsoPipeline, B: IsoPipeline, p: int) -> IsoPipeline:
    """A ~ K^l and B ~ K^m (pipelines from parts onto spaces), l <= m, as one
    pipeline from the tagged union of the parts onto K^m."""
    from .sets import TaggedUnion
    l, m = A.target.d, B.target.d
    steps = (TagMap(((0, A.steps), (1, B.steps))),) + merge2(l, m, p)
    return IsoPipeline(TaggedUnion(((0, A.source), (1, B.source))), Space(m), steps)


def merge_equal(count: int, l: int) -> tuple:
    """Steps from tags 0..count-1 of copies of (R minus 0)^l onto (R minus 0)^l:
    peel the leading coordinates off, then interleave the last one across all
    the copies."""
    if count == 1:
        return (Inverse((Tag(0),)),)
    if l == 1:
        return (Interleave(count),)
    return (Peel(), CoordinateMap((Block(1, 1, ()), Block(1, l - 1, merge_equal(count, l - 1)))))


def _coordinatewise(l: int, steps: tuple) -> tuple:
    if l == 0 or not steps:
        return ()
    return (CoordinateMap(tuple(Block(1, 1, steps) for _ in range(l))),)


def classify_to_Kd(X: SetDescriptor, p: int | None = None):
    """An IsoPipeline from X onto K^dim(X), or FinitePoints when X is finite.

    Each part is carried onto (R minus 0)^l; parts of equal dimension are then
    merged in one interleave and moved onto K^l, and the lower-dimensional
    groups (all points together) are absorbed into the top group."""
    d = dimension_of(X)
    if d < 0:
        raise ValueError("X is empty")
    if d == 0:
        return FinitePoints(tuple(finite_points(X)))
    p = p or descriptor_prime(X)
    parts = sorted(rectilinearize(X, (), p), key=lambda r: -r.box.l)
    if not parts or parts[0].box.l != d:
        raise AssertionError("rectilinearization lost the top dimension")
    groups = []          # (dim, [parts]), dimensions decreasing
    for part in parts:
        l = part.box.l
        if groups and groups[-1][0] == l:
            groups[-1][1].append(part)
        else:
            groups.append((l, [part]))
    branches = []
    for g, (l, members) in enumerate(groups):
        for j, part in enumerate(members):
            to_rnz = _coordinatewise(l, level_to_rnz(p, part.box.k))
            branches.append((part.part, (Inverse(part.pipeline.steps),) + to_rnz
                             + (Tag(j), Tag(g))))
    merges = []
    for g, (l, members) in enumerate(groups):
        if l == 0:
            merged = () if len(members) > 1 else (Inverse((Tag(0),)),)
        else:
            merged = merge_equal(len(members), l) + _coordinatewise(l, (Inverse(K_ISO_STEPS),))
        merges.append((g, merged))
    steps = [CaseSplit(tuple(branches)), TagMap(tuple(merges))]
    for g in range(1, len(groups)):
        l, members = groups[g]
        absorb = (PointAbsorb(d, p, len(members)),) if l == 0 else merge2(l, d, p)
        steps += [TagGather(g), TagMap(((0, absorb),))]
    steps.append(Inverse((Tag(0),)))
    return IsoPipeline(X, Space(d), tuple(steps))


def isomorphism(X: SetDescriptor, Y: SetDescriptor, p: int | None = None) -> IsoPipeline:
    """A bijection X -> Y when dim X = dim Y (and |X| = |Y| for finite sets)."""
    p = p or descriptor_prime(X) or descriptor_prime(Y)
    dx, dy = dimension_of(X), dimension_of(Y)
    if dx != dy:
        raise ValueError(f"dimensions differ: {dx} != {dy}")
    if dx < 0:
        return IsoPipeline(X, Y, ())
    cx, cy = classify_to_Kd(X, p), classify_to_Kd(Y, p)
    if dx == 0:
        if len(cx.points) != len(cy.points):
            raise ValueError(f"finite sets of sizes {len(cx.points)} and {len(cy.points)}")
        branches = tuple((Point(a), (Inverse((Constant(a),)), Constant(b)))
                         for a, b in zip(cx.points, cy.points))
        return IsoPipeline(X, Y, (CaseSplit(branches),))
    return IsoPipeline(X, Y, cx.steps + (Inverse(cy.steps),))
