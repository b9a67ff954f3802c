"""Atomic invertible maps and their composition into pipelines.

Points are tuples.  Coordinates are PAdic values; elements of tagged unions
are ``Tagged(tag, point)`` entries.  Every step evaluates exactly in both
directions on exact inputs (PowerCoset backward may return truncated roots)
and raises DomainError outside its declared domain.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

from .hensel import in_level, in_power_level, nth_root_in_level
from .padic import INF, IndeterminateError, PAdic, PrecisionError, vp_int
from .sets import (SQ_LE, SQ_NONE, Cell1D, LevelBox, PipelineImage, Point,
                   SetDescriptor, Space, Tagged, TaggedUnion, Union, arity, member)

DEFAULT_PRECISION = 24
FORWARD, BACKWARD = "forward", "backward"


class DomainError(ValueError):
    """A point lies outside the domain of the step applied to it."""


class IsoStep:
    def forward(self, x: tuple, prec: int) -> tuple:
        raise NotImplementedError

    def backward(self, x: tuple, prec: int) -> tuple:
        raise NotImplementedError


def _one(x: tuple) -> PAdic:
    if len(x) == 1 and type(x[0]) is PAdic:
        return x[0]
    if len(x) != 1 or not isinstance(x[0], PAdic):
        raise DomainError(f"expected a single coordinate, got {x!r}")
    return x[0]


def _tagged(x: tuple) -> Tagged:
    if len(x) == 1 and type(x[0]) is Tagged:
        return x[0]
    if len(x) != 1 or not isinstance(x[0], Tagged):
        raise DomainError(f"expected a tagged point, got {x!r}")
    return x[0]


def is_pi_power(x: PAdic) -> bool:
    """Whether x = p^v(x) exactly (x nonzero)."""
    if x.is_exact:
        return x.is_pi_power()
    if x.unit_residue(x.prec) == 1:
        raise IndeterminateError(f"{x!r} matches a power of p on every known digit")
    return False


# -- one-coordinate steps ---------------------------------------------------

@dataclass(frozen=True)
class Translate(IsoStep):
    c: PAdic

    def forward(self, x, prec):
        return (_one(x) + self.c,)

    def backward(self, x, prec):
        return (_one(x) - self.c,)


@dataclass(frozen=True)
class Scale(IsoStep):
    a: PAdic

    def __post_init__(self):
        if self.a.is_zero:
            raise ValueError("Scale needs a nonzero factor")

    def forward(self, x, prec):
        return (_one(x) * self.a,)

    def backward(self, x, prec):
        return (_one(x) / self.a,)


@dataclass(frozen=True)
class Invert(IsoStep):
    def forward(self, x, prec):
        y = _one(x)
        if y.is_zero:
            raise DomainError("cannot invert 0")
        return (y.inverse(),)

    backward = forward


@dataclass(frozen=True)
class PowerCoset(IsoStep):
    """x -> gamma * x^n on K^(k), onto gamma * P_n^(k + v(n))."""

    gamma: PAdic
    n: int
    k: int

    def forward(self, x, prec):
        y = _one(x)
        if not in_level(y, self.k):
            raise DomainError(f"{y!r} is not in K^({self.k})")
        return (self.gamma * y ** self.n,)

    def backward(self, x, prec):
        y = _one(x)
        if y.is_zero:
            raise DomainError("0 is not in the image")
        z = y / self.gamma
        kp = self.k + vp_int(self.n, y.p)
        if not in_power_level(z, self.n, kp):
            raise DomainError(f"{y!r} is not in gamma*P_{self.n}^({kp})")
        return (nth_root_in_level(z, self.n, self.k, prec),)


@dataclass(frozen=True)
class HotelShift(IsoStep):
    """R -> R minus {0}: 0 -> 1, p^n -> p^(n+1), identity elsewhere."""

    def forward(self, x, prec):
        y = _one(x)
        if y.is_zero:
            return (PAdic(y.p, 1),)
        if y.val < 0:
            raise DomainError(f"{y!r} is not in R")
        if is_pi_power(y):
            return (y.shift(1),)
        return (y,)

    def backward(self, x, prec):
        y = _one(x)
        if y.is_zero or y.val < 0:
            raise DomainError(f"{y!r} is not in R minus 0")
        if is_pi_power(y):
            return (PAdic(y.p, 0),) if y.val == 0 else (y.shift(-1),)
        return (y,)


@dataclass(frozen=True)
class ValuationInterleave(IsoStep):
    """x -> x * p^((m-1) v(x) + tag), so v becomes m v(x) + tag.  With m = 2
    images of tag 0 have even valuation, tag 1 odd."""

    tag: int
    m: int = 2

    def __post_init__(self):
        if not 0 <= self.tag < self.m:
            raise ValueError(f"tag {self.tag} not in 0..{self.m - 1}")

    def forward(self, x, prec):
        y = _one(x)
        if y.is_zero:
            raise DomainError("0 has no valuation")
        return (y.shift((self.m - 1) * y.val + self.tag),)

    def backward(self, x, prec):
        y = _one(x)
        if y.is_zero or y.val % self.m != self.tag:
            raise DomainError(f"{y!r} has the wrong valuation class for tag {self.tag}")
        a = (y.val - self.tag) // self.m
        return (y.shift(a - y.val),)


@dataclass(frozen=True)
class Interleave(IsoStep):
    """m tagged copies merged by valuation class: (t, x) -> x * p^((m-1) v(x) + t)."""

    m: int = 2

    def forward(self, x, prec):
        t = _tagged(x)
        if not 0 <= t.tag < self.m:
            raise DomainError(f"tag {t.tag} not in 0..{self.m - 1}")
        return ValuationInterleave(t.tag, self.m).forward(t.point, prec)

    def backward(self, x, prec):
        y = _one(x)
        if y.is_zero:
            raise DomainError("0 has no valuation")
        tag = y.val % self.m
        return (Tagged(tag, ValuationInterleave(tag, self.m).backward(x, prec)),)


@dataclass(frozen=True)
class PairToK(IsoStep):
    """({0} x R) u ({1} x R minus 0) -> K: (0, x) -> x, (1, x) -> 1/(p x)."""

    def forward(self, x, prec):
        t = _tagged(x)
        y = _one(t.point)
        if t.tag == 0:
            if not y.is_zero and y.val < 0:
                raise DomainError(f"{y!r} is not in R")
            return (y,)
        if t.tag == 1:
            if y.is_zero or y.val < 0:
                raise DomainError(f"{y!r} is not in R minus 0")
            return ((y * y.p).inverse(),)
        raise DomainError(f"tag {t.tag} not in {{0, 1}}")

    def backward(self, x, prec):
        y = _one(x)
        if y.is_zero or y.val >= 0:
            return (Tagged(0, (y,)),)
        return (Tagged(1, ((y * y.p).inverse(),)),)


# -- multi-coordinate and structural steps ----------------------------------

@dataclass(frozen=True)
class MonomialTwist(IsoStep):
    """x_j -> alpha * x_j * prod_{i != j} x_i^eta_i (0-based j)."""

    j: int
    alpha: PAdic
    eta: tuple[int, ...]

    def _factor(self, x):
        f = self.alpha
        for i, (e, xi) in enumerate(zip(self.eta, x)):
            if i == self.j or e == 0:
                continue
            if not isinstance(xi, PAdic) or xi.is_zero:
                raise DomainError("twist needs nonzero companion coordinates")
            f = f * xi ** e
        return f

    def forward(self, x, prec):
        if len(x) != len(self.eta):
            raise DomainError("arity mismatch")
        out = list(x)
        out[self.j] = x[self.j] * self._factor(x)
        return tuple(out)

    def backward(self, x, prec):
        if len(x) != len(self.eta):
            raise DomainError("arity mismatch")
        out = list(x)
        out[self.j] = x[self.j] / self._factor(x)
        return tuple(out)


@dataclass(frozen=True)
class Permute(IsoStep):
    """Output coordinate i is input coordinate perm[i]."""

    perm: tuple[int, ...]

    def forward(self, x, prec):
        if len(x) != len(self.perm):
            raise DomainError("arity mismatch")
        return tuple(x[i] for i in self.perm)

    def backward(self, x, prec):
        if len(x) != len(self.perm):
            raise DomainError("arity mismatch")
        out = [None] * len(x)
        for i, src in enumerate(self.perm):
            out[src] = x[i]
        return tuple(out)


@dataclass(frozen=True)
class Constant(IsoStep):
    """() -> point."""

    point: tuple[PAdic, ...]

    def forward(self, x, prec):
        if x != ():
            raise DomainError(f"expected the empty point, got {x!r}")
        return self.point

    def backward(self, x, prec):
        if len(x) != len(self.point) or not member(Point(self.point), x):
            raise DomainError(f"{x!r} is not {self.point!r}")
        return ()


@dataclass(frozen=True)
class Block:
    width_in: int
    width_out: int
    steps: tuple[IsoStep, ...] = ()


@dataclass(frozen=True)
class CoordinateMap(IsoStep):
    """Apply sub-pipelines to consecutive coordinate blocks."""

    blocks: tuple[Block, ...]

    @cached_property
    def _widths(self):
        return (sum(b.width_in for b in self.blocks), sum(b.width_out for b in self.blocks))

    def _run(self, x, prec, width, run, attr):
        if len(x) != width:
            raise DomainError(f"arity mismatch: {len(x)} != {width}")
        if len(self.blocks) == 1:
            return run(self.blocks[0].steps, x, prec)
        out, i = (), 0
        for b in self.blocks:
            w = getattr(b, attr)
            out += run(b.steps, x[i:i + w], prec)
            i += w
        return out

    def forward(self, x, prec):
        return self._run(x, prec, self._widths[0], run_steps, "width_in")

    def backward(self, x, prec):
        return self._run(x, prec, self._widths[1], run_steps_backward, "width_out")


@dataclass(frozen=True)
class Tag(IsoStep):
    tag: int

    def forward(self, x, prec):
        return (Tagged(self.tag, tuple(x)),)

    def backward(self, x, prec):
        t = _tagged(x)
        if t.tag != self.tag:
            raise DomainError(f"tag {t.tag} != {self.tag}")
        return t.point


@dataclass(frozen=True)
class TagMap(IsoStep):
    """Apply a sub-pipeline chosen by tag; unlisted tags pass through."""

    branches: tuple[tuple[int, tuple[IsoStep, ...]], ...]

    @cached_property
    def _table(self):
        return dict(self.branches)

    def _steps(self, tag):
        return self._table.get(tag, ())

    def forward(self, x, prec):
        t = _tagged(x)
        return (Tagged(t.tag, run_steps(self._steps(t.tag), t.point, prec)),)

    def backward(self, x, prec):
        t = _tagged(x)
        return (Tagged(t.tag, run_steps_backward(self._steps(t.tag), t.point, prec)),)


@dataclass(frozen=True)
class TagSplit(IsoStep):
    """(i, x) -> (i mod 2, (i div 2, x)): regroups copies for a binary merge tree."""

    def forward(self, x, prec):
        t = _tagged(x)
        if t.tag < 0:
            raise DomainError("negative tag")
        return (Tagged(t.tag % 2, (Tagged(t.tag // 2, t.point),)),)

    def backward(self, x, prec):
        t = _tagged(x)
        inner = _tagged(t.point)
        return (Tagged(2 * inner.tag + t.tag, inner.point),)


@dataclass(frozen=True)
class TagGather(IsoStep):
    """Brings tag j next to the accumulated tag 0: (0, y) -> (0, ((1, y),)),
    (j, y) -> (0, ((0, y),)); other tags pass through."""

    j: int

    def forward(self, x, prec):
        t = _tagged(x)
        if t.tag == 0:
            return (Tagged(0, (Tagged(1, t.point),)),)
        if t.tag == self.j:
            return (Tagged(0, (Tagged(0, t.point),)),)
        return x

    def backward(self, x, prec):
        t = _tagged(x)
        if t.tag == self.j:
            raise DomainError(f"tag {self.j} was consumed by this step")
        if t.tag != 0:
            return x
        inner = _tagged(t.point)
        if inner.tag == 1:
            return (Tagged(0, inner.point),)
        if inner.tag == 0:
            return (Tagged(self.j, inner.point),)
        raise DomainError(f"tag {inner.tag} not in {{0, 1}}")


@dataclass(frozen=True)
class Untag(IsoStep):
    """(i, x) -> x for disjoint subsets guards[i] of a common space."""

    guards: tuple[SetDescriptor, ...]

    def forward(self, x, prec):
        t = _tagged(x)
        if not 0 <= t.tag < len(self.guards):
            raise DomainError(f"tag {t.tag} out of range")
        if not member(self.guards[t.tag], t.point):
            raise DomainError(f"{t.point!r} is outside guard {t.tag}")
        return t.point

    def backward(self, x, prec):
        for i, g in enumerate(self.guards):
            if member(g, x):
                return (Tagged(i, tuple(x)),)
        raise DomainError(f"{x!r} lies in no guard")


@dataclass(frozen=True)
class CaseSplit(IsoStep):
    """Piecewise map: the branch whose guard contains the input is applied."""

    branches: tuple[tuple[SetDescriptor, tuple[IsoStep, ...]], ...]

    @cached_property
    def _undoes_guard(self) -> tuple[bool, ...]:
        # a branch that opens with Inverse(S) on a guard that is the image
        # under S can reuse the preimage computed by the membership test
        return tuple(isinstance(g, PipelineImage) and bool(steps)
                     and isinstance(steps[0], Inverse) and steps[0].steps == g.steps
                     for g, steps in self.branches)

    def forward(self, x, prec):
        for (guard, steps), undo in zip(self.branches, self._undoes_guard):
            if undo:
                y = image_preimage(guard, x)
                if y is not None:
                    return run_steps(steps[1:], y, prec)
            elif member(guard, x):
                return run_steps(steps, x, prec)
        raise DomainError(f"{x!r} lies in no branch")

    def backward(self, x, prec):
        for (guard, steps), undo in zip(self.branches, self._undoes_guard):
            try:
                if undo:
                    z = run_steps_backward(steps[1:], x, prec)
                    if member(guard.source, z):
                        return run_steps(guard.steps, z, prec)
                    continue
                y = run_steps_backward(steps, x, prec)
            except DomainError:
                continue
            if member(guard, y):
                return y
        raise DomainError(f"{x!r} is the image of no branch")


@dataclass(frozen=True)
class PointAbsorb(IsoStep):
    """{a_0, ..., a_(c-1)} u K^d -> K^d (tags 0 and 1): a_j goes to
    (p^j, 0, ..., 0) and the line {(r, 0, ..., 0) : r in R minus 0} is shifted
    by a hotel map with c rooms.  For c = 1 the tag-0 point is (); otherwise
    it is ((j, ()),), naming a_j."""

    d: int
    p: int
    count: int = 1

    def _on_line(self, y):
        first = y[0]
        if first.is_zero or first.val < 0:
            return False
        return all(c.is_zero for c in y[1:])

    def _index(self, point):
        if self.count == 1:
            if point != ():
                raise DomainError("the absorbed point must be the empty tuple")
            return 0
        t = _tagged(point)
        if t.point != () or not 0 <= t.tag < self.count:
            raise DomainError(f"expected a point index below {self.count}, got {point!r}")
        return t.tag

    def forward(self, x, prec):
        t = _tagged(x)
        if t.tag == 0:
            return (PAdic(self.p, self.p ** self._index(t.point)),) + self._zeros()
        if t.tag != 1 or len(t.point) != self.d:
            raise DomainError("expected (1, K^d point)")
        y = t.point
        if self._on_line(y) and is_pi_power(y[0]):
            return (y[0].shift(self.count),) + y[1:]
        return y

    def backward(self, x, prec):
        if len(x) != self.d:
            raise DomainError("arity mismatch")
        if self._on_line(x) and is_pi_power(x[0]):
            j = x[0].val
            if j >= self.count:
                return (Tagged(1, (x[0].shift(-self.count),) + x[1:]),)
            return (Tagged(0, () if self.count == 1 else (Tagged(j, ()),)),)
        return (Tagged(1, tuple(x)),)

    def _zeros(self):
        return tuple(PAdic(self.p, 0) for _ in range(self.d - 1))


@dataclass(frozen=True)
class Peel(IsoStep):
    """(t, (x1, rest)) -> (x1, (t, rest))."""

    def forward(self, x, prec):
        t = _tagged(x)
        if not t.point:
            raise DomainError("cannot peel the empty point")
        return (t.point[0], Tagged(t.tag, tuple(t.point[1:])))

    def backward(self, x, prec):
        if len(x) != 2 or not isinstance(x[1], Tagged):
            raise DomainError(f"expected (x1, tagged), got {x!r}")
        return (Tagged(x[1].tag, (x[0],) + x[1].point),)


@dataclass(frozen=True)
class Inverse(IsoStep):
    steps: tuple[IsoStep, ...]

    def forward(self, x, prec):
        return run_steps_backward(self.steps, x, prec)

    def backward(self, x, prec):
        return run_steps(self.steps, x, prec)


def steps_prime(obj) -> int | None:
    """The prime of the first PAdic parameter found in (nested) steps."""
    if isinstance(obj, PAdic):
        return obj.p
    if isinstance(obj, (tuple, list)):
        for o in obj:
            q = steps_prime(o)
            if q:
                return q
        return None
    if isinstance(obj, PointAbsorb):
        return obj.p
    if isinstance(obj, (IsoStep, Block, SetDescriptor)) and hasattr(obj, "__dataclass_fields__"):
        return steps_prime(tuple(getattr(obj, f) for f in obj.__dataclass_fields__))
    return None


# -- evaluation -------------------------------------------------------------

def simplify(steps) -> tuple:
    """The same map on its domain, with identity steps dropped and nested
    inverses flattened."""
    out = []
    for st in steps:
        out.extend(_simplified(st))
    return tuple(out)


def _simplified(st) -> tuple:
    if isinstance(st, MonomialTwist):
        if st.alpha == 1 and not any(e for i, e in enumerate(st.eta) if i != st.j):
            return ()
    elif isinstance(st, CoordinateMap):
        blocks = tuple(Block(b.width_in, b.width_out, simplify(b.steps)) for b in st.blocks)
        if all(not b.steps for b in blocks):
            return ()
        return (CoordinateMap(blocks),)
    elif isinstance(st, Inverse):
        inner = simplify(st.steps)
        if len(inner) == 1 and isinstance(inner[0], Inverse):
            return inner[0].steps
        return (Inverse(inner),) if inner else ()
    elif isinstance(st, TagMap):
        branches = tuple((t, s) for t, s in ((t, simplify(s)) for t, s in st.branches) if s)
        return (TagMap(branches),) if branches else ()
    return (st,)


def run_steps(steps, x, prec: int = DEFAULT_PRECISION) -> tuple:
    x = tuple(x)
    for st in steps:
        x = st.forward(x, prec)
    return x


def run_steps_backward(steps, x, prec: int = DEFAULT_PRECISION) -> tuple:
    x = tuple(x)
    for st in steps[::-1]:
        x = st.backward(x, prec)
    return x


def apply(step: IsoStep, direction: str, x, prec: int = DEFAULT_PRECISION) -> tuple:
    x = tuple(x)
    try:
        if direction == FORWARD:
            return step.forward(x, prec)
        if direction == BACKWARD:
            return step.backward(x, prec)
    except ZeroDivisionError as e:
        raise DomainError(str(e)) from e
    raise ValueError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class IsoPipeline:
    source: SetDescriptor | None
    target: SetDescriptor | None
    steps: tuple[IsoStep, ...] = ()

    def with_source(self, source) -> "IsoPipeline":
        return replace(self, source=source)

    def then(self, other: "IsoPipeline") -> "IsoPipeline":
        return IsoPipeline(self.source, other.target, self.steps + other.steps)

    def inverse(self) -> "IsoPipeline":
        return IsoPipeline(self.target, self.source, (Inverse(self.steps),))

    def image(self) -> PipelineImage:
        return PipelineImage(self.source, self.steps, arity(self.target)
                             if self.target is not None else 1)


def apply_pipeline(P: IsoPipeline, direction: str, x, prec: int = DEFAULT_PRECISION) -> tuple:
    """Run all steps; errors carry the index of the failing step."""
    steps = list(enumerate(P.steps))
    if direction == BACKWARD:
        steps.reverse()
    elif direction != FORWARD:
        raise ValueError(f"unknown direction {direction!r}")
    x = tuple(x)
    for i, st in steps:
        try:
            x = apply(st, direction, x, prec)
        except (DomainError, PrecisionError) as e:
            raise type(e)(f"step {i} ({type(st).__name__}): {e}") from e
    return x


def valuation_hint_ok(hint, x) -> bool:
    """Necessary condition from an affine valuation table (see rectilinear)."""
    cs, rows = hint
    w = {}
    for xi, ci, (c, A) in zip(x, cs, rows):
        if not isinstance(xi, PAdic):
            return True
        y = xi - ci if not ci.is_zero else xi
        v = y.val
        nz = [(j, a) for j, a in enumerate(A) if a]
        if not nz:
            if v != c:
                return False
            continue
        if v == INF or c == INF:
            return False
        if len(nz) == 1:
            j, a = nz[0]
            q, r = divmod(v - c, a)
            if r or q < 0 or w.setdefault(j, q) != q:
                return False
    return True


def image_preimage(img: PipelineImage, x):
    """The source point mapping to x, or None when x is not in the image."""
    if img.hint is not None:
        try:
            if not valuation_hint_ok(img.hint, x):
                return None
        except PrecisionError:
            pass
    try:
        y = run_steps_backward(img.steps, x)
    except (DomainError, ZeroDivisionError):
        return None
    return y if member(img.source, y) else None


def image_member(img: PipelineImage, x) -> bool:
    return image_preimage(img, x) is not None


# -- catalogue of pipelines -------------------------------------------------

def r_minus_zero(p: int) -> Cell1D:
    return Cell1D(c=PAdic(p, 0), lam=PAdic(p, 1), a1=PAdic(p, 1), sq1=SQ_LE)


def r_cell(p: int) -> Union:
    """R: the point 0 together with the cell R minus 0."""
    return Union((Point((PAdic(p, 0),)), r_minus_zero(p)))


def r_level(p: int, k: int) -> Cell1D:
    return Cell1D(c=PAdic(p, 0), lam=PAdic(p, 1), a1=PAdic(p, 1), sq1=SQ_LE, level=k)


def hotel(direction: str, x) -> tuple:
    return apply(HotelShift(), direction, x)


def hotel_pipeline(p: int) -> IsoPipeline:
    """R -> R minus {0}."""
    return IsoPipeline(r_cell(p), r_minus_zero(p), (HotelShift(),))


K_ISO_STEPS = (Inverse((PairToK(),)), TagMap(((0, (HotelShift(),)),)), Interleave())


def k_iso(direction: str, x, prec: int = DEFAULT_PRECISION) -> tuple:
    """K -> R minus {0} (forward) and back."""
    if direction == FORWARD:
        return run_steps(K_ISO_STEPS, x, prec)
    return run_steps_backward(K_ISO_STEPS, x, prec)


def k_iso_pipeline(p: int) -> IsoPipeline:
    return IsoPipeline(Space(1), r_minus_zero(p), K_ISO_STEPS)


def merge_tree(count: int) -> tuple[IsoStep, ...]:
    """Steps merging tags 0..count-1 of copies of a valuation-saturated set
    into one copy (one Interleave over all the copies)."""
    if count < 1:
        raise ValueError("need at least one copy")
    if count == 1:
        return (Inverse((Tag(0),)),)
    return (Interleave(count),)


def union_merge(parts, shape: SetDescriptor) -> IsoPipeline:
    """Tagged union of parts, each with steps onto ``shape``, onto ``shape``.

    ``shape`` must be R minus {0} or some R^(k) (closed under the interleave)."""
    if not (isinstance(shape, Cell1D) and shape.c.is_zero and shape.n == 1
            and shape.lam == 1 and shape.sq2 == SQ_NONE and shape.a1 is not None
            and shape.a1.val == 0) and not (isinstance(shape, LevelBox) and shape.l == 1):
        raise ValueError("union_merge needs R minus 0 or R^(k) as the common shape")
    parts = list(parts)
    branches = tuple((i, tuple(steps)) for i, (_, steps) in enumerate(parts) if steps)
    src = TaggedUnion(tuple((i, d) for i, (d, _) in enumerate(parts)))
    steps = ((TagMap(branches),) if branches else ()) + merge_tree(len(parts))
    return IsoPipeline(src, shape, steps)


def unit_classes(p: int, k: int) -> list[int]:
    m = p ** k
    return [u for u in range(1, m) if u % p]


def level_to_rnz(p: int, k: int) -> tuple[IsoStep, ...]:
    """R^(k) -> R minus {0}: split R minus 0 into the classes alpha R^(k) and merge
    that many copies of R^(k) into one."""
    alphas = unit_classes(p, k)
    guards = tuple(Cell1D(c=PAdic(p, 0), lam=PAdic(p, a), a1=PAdic(p, 1), sq1=SQ_LE, level=k)
                   for a in alphas)
    scale = TagMap(tuple((i, (Scale(PAdic(p, a)),)) for i, a in enumerate(alphas) if a != 1))
    return (Inverse(merge_tree(len(alphas))), scale, Untag(guards))


def level_to_k(p: int, k: int) -> tuple[IsoStep, ...]:
    """R^(k) -> K."""
    return level_to_rnz(p, k) + (Inverse(K_ISO_STEPS),)


def box_to_space(p: int, l: int, k: int) -> IsoPipeline:
    """prod R^(k) (l factors) -> K^l, coordinatewise."""
    if l == 0:
        return IsoPipeline(LevelBox(0, k), Space(0), ())
    one = level_to_k(p, k)
    return IsoPipeline(LevelBox(l, k), Space(l),
                       (CoordinateMap(tuple(Block(1, 1, one) for _ in range(l))),))


def disjoint_union_realize(X: SetDescriptor, Y: SetDescriptor, p: int):
    """Disjoint copies X', Y' of X and Y inside K^max(m, n).

    Returns (X', Y', pipe_X, pipe_Y), the pipelines mapping X onto X' and Y
    onto Y'.  The first coordinate is squeezed into R minus 0 and interleaved
    with tags 0 and 1, so the copies differ in valuation parity there."""
    m, n = arity(X), arity(Y)
    swapped = m < n
    if swapped:
        X, Y, m, n = Y, X, n, m
    if m == 0:
        raise ValueError("cannot separate two subsets of K^0")

    def squeeze(tag, width):
        first = Block(1, 1, K_ISO_STEPS + (ValuationInterleave(tag),))
        rest = (Block(width - 1, width - 1, ()),) if width > 1 else ()
        return CoordinateMap((first,) + rest)

    pad = ()
    if n < m:
        zeros = tuple(PAdic(p, 0) for _ in range(m - n))
        pad = (CoordinateMap((Block(n, n, ()), Block(0, m - n, (Constant(zeros),)))),)
    px = IsoPipeline(X, None, (squeeze(0, m),))
    py = IsoPipeline(Y, None, pad + (squeeze(1, m),))
    xi = PipelineImage(X, px.steps, m)
    yi = PipelineImage(Y, py.steps, m)
    px, py = replace(px, target=xi), replace(py, target=yi)
    if swapped:
        return yi, xi, py, px
    return xi, yi, px, py
