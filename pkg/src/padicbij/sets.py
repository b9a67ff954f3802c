"""Set descriptors: one-variable cells, level boxes, presented cells, valuation
polytopes, products and unions, with exact membership and dimension."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .hensel import in_level, in_power_level, power_margin
from .padic import INF, IndeterminateError, PAdic, PrecisionError, scaled

SQ_NONE, SQ_LE, SQ_LT = "none", "<=", "<"


@dataclass(frozen=True)
class Tagged:
    """An element (tag, point) of a tagged disjoint union."""

    tag: int
    point: tuple

    def __repr__(self):
        return f"Tagged({self.tag}, {self.point!r})"


class SetDescriptor:
    """Base class of all descriptors."""


@dataclass(frozen=True)
class Point(SetDescriptor):
    coords: tuple[PAdic, ...]


@dataclass(frozen=True)
class Empty(SetDescriptor):
    arity: int = 1


@dataclass(frozen=True)
class Space(SetDescriptor):
    """K^d."""

    d: int


@dataclass(frozen=True)
class Cell1D(SetDescriptor):
    """{x : v(a1) sq1 v(x - c) sq2 v(a2), x - c in lam * P_n^(level)}.

    ``lam = 0`` makes the cell the singleton {c}.
    """

    c: PAdic
    lam: PAdic
    n: int = 1
    a1: PAdic | None = None
    a2: PAdic | None = None
    sq1: str = SQ_NONE
    sq2: str = SQ_NONE
    level: int = 0

    def __post_init__(self):
        if (self.a1 is None) != (self.sq1 == SQ_NONE):
            raise ValueError("lower bound present iff sq1 is not 'none'")
        if (self.a2 is None) != (self.sq2 == SQ_NONE):
            raise ValueError("upper bound present iff sq2 is not 'none'")
        for a in (self.a1, self.a2):
            if a is not None and a.is_zero:
                raise ValueError("cell bounds must be nonzero")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def p(self) -> int:
        return self.c.p

    def window(self) -> tuple[float, float]:
        """Closed valuation window [lo, hi] of x - c (strict bounds tightened)."""
        lo, hi = -INF, INF
        if self.a1 is not None:
            lo = self.a1.val + (1 if self.sq1 == SQ_LT else 0)
        if self.a2 is not None:
            hi = self.a2.val - (1 if self.sq2 == SQ_LT else 0)
        return lo, hi


@dataclass(frozen=True)
class LevelBox(SetDescriptor):
    """The product of l copies of R^(k); l = 0 is the one-point set {()}."""

    l: int
    k: int


@dataclass(frozen=True)
class MonomialForm:
    """A function b with v(b(x)) = v(beta * prod (x_i - c_i)^mu_i) / e.

    ``beta = 0`` stands for the zero function (valuation +inf).
    """

    e: int
    beta: PAdic
    mu: tuple[int, ...]

    def __post_init__(self):
        if self.e < 1:
            raise ValueError("e must be at least 1")
        if not self.beta.is_exact:
            raise ValueError("beta must be exact")

    def valuation_times_e(self, x, c=None):
        """e * v(b(x)): the valuation of beta * prod (x_i - c_i)^mu_i."""
        if self.beta.is_zero:
            return INF
        total = self.beta.val
        for i, (m, xi) in enumerate(zip(self.mu, x)):
            if m == 0:
                continue
            y = xi if c is None else xi - c[i]
            if y.is_zero:
                if m < 0:
                    raise ZeroDivisionError("negative power of a zero coordinate")
                return INF
            total += m * y.val
        return total


@dataclass(frozen=True)
class Bound:
    """The monomial v(beta * prod_{i<l} x_i^nu_i) bounding v(x_l)."""

    beta: PAdic
    nu: tuple[int, ...]
    strict: bool = False

    def __post_init__(self):
        if self.beta.is_zero or not self.beta.is_exact:
            raise ValueError("bound constant must be exact and nonzero")


@dataclass(frozen=True)
class PresentedCell(SetDescriptor):
    """x_1..x_{l-1} in R^(k), x_l in K^(k) (in R^(k) when ``last_in_R``), with
    optional monomial bounds  v(lower) <= v(x_l) <= v(upper)."""

    l: int
    k: int
    upper: Bound | None = None
    lower: Bound | None = None
    last_in_R: bool = True

    def __post_init__(self):
        if self.l < 1 or self.k < 1:
            raise ValueError("presented cells need l >= 1 and k >= 1")
        for b in (self.upper, self.lower):
            if b is not None and len(b.nu) != self.l - 1:
                raise ValueError(f"exponent vector must have length {self.l - 1}")

    def polytope(self) -> "PolySet":
        l = self.l
        rows = []
        for i in range(l - 1 + (1 if self.last_in_R else 0)):
            rows.append(_unit_row(l, i))
        if self.lower is not None:
            b = self.lower
            rows.append((-b.beta.val - (1 if b.strict else 0),
                         *(-a for a in b.nu), 1))
        if self.upper is not None:
            b = self.upper
            rows.append((b.beta.val - (1 if b.strict else 0), *b.nu, -1))
        return PolySet(l, self.k, tuple(rows))


def _unit_row(l: int, i: int) -> tuple[int, ...]:
    row = [0] * (l + 1)
    row[i + 1] = 1
    return tuple(row)


@dataclass(frozen=True)
class PolySet(SetDescriptor):
    """{x in (K^(k))^l : a0 + sum a_i v(x_i) >= 0 for each row (a0, a1..al)}."""

    l: int
    k: int
    ineqs: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        for row in self.ineqs:
            if len(row) != self.l + 1:
                raise ValueError("each inequality needs l+1 coefficients")

    def holds(self, vals) -> bool:
        return all(r[0] + sum(a * v for a, v in zip(r[1:], vals)) >= 0 for r in self.ineqs)


@dataclass(frozen=True)
class Product(SetDescriptor):
    left: SetDescriptor
    right: SetDescriptor


@dataclass(frozen=True)
class TaggedUnion(SetDescriptor):
    """Disjoint union of (tag, set) pairs; elements are 1-tuples (Tagged(tag, x),)."""

    items: tuple[tuple[int, SetDescriptor], ...]

    def item(self, tag: int) -> SetDescriptor:
        for t, s in self.items:
            if t == tag:
                return s
        raise KeyError(tag)


@dataclass(frozen=True)
class Union(SetDescriptor):
    """Union of pairwise disjoint sets living in the same K^m."""

    items: tuple[SetDescriptor, ...]


@dataclass(frozen=True)
class PipelineImage(SetDescriptor):
    """Image of ``source`` under an invertible step sequence."""

    source: SetDescriptor
    steps: tuple[Any, ...]
    arity: int = field(default=1)
    # optional (centers, rows): v(x_i - c_i) = c_i' + A_i . w for some w >= 0;
    # a necessary condition used to reject points quickly
    hint: Any = field(default=None, compare=False, repr=False)


# -- structural helpers -----------------------------------------------------

def arity(S: SetDescriptor) -> int:
    """Length of the point tuples of S."""
    if isinstance(S, Point):
        return len(S.coords)
    if isinstance(S, (Cell1D, TaggedUnion)):
        return 1
    if isinstance(S, (LevelBox, PresentedCell, PolySet)):
        return S.l
    if isinstance(S, Space):
        return S.d
    if isinstance(S, Product):
        return arity(S.left) + arity(S.right)
    if isinstance(S, Union):
        return arity(S.items[0])
    if isinstance(S, (Empty, PipelineImage)):
        return S.arity
    raise TypeError(f"not a descriptor: {S!r}")


def centers(S: SetDescriptor, p: int) -> tuple[PAdic, ...]:
    """Per-coordinate offsets c such that attached forms are read in x - c."""
    if isinstance(S, Cell1D):
        return (S.c,)
    if isinstance(S, Product):
        return centers(S.left, p) + centers(S.right, p)
    return tuple(PAdic(p, 0) for _ in range(arity(S)))


# -- membership -------------------------------------------------------------

def member(S: SetDescriptor, x: tuple) -> bool:
    """Exact membership of the point tuple x in S."""
    if len(x) != arity(S):
        return False
    if isinstance(S, Point):
        return all(_same(a, b) for a, b in zip(x, S.coords))
    if isinstance(S, Empty):
        return False
    if isinstance(S, Space):
        return all(isinstance(a, PAdic) for a in x)
    if isinstance(S, Cell1D):
        return _cell_member(S, x[0])
    if isinstance(S, LevelBox):
        return all(_in_r_level(a, S.k) for a in x)
    if isinstance(S, PresentedCell):
        return member(S.polytope(), x)
    if isinstance(S, PolySet):
        for a in x:
            if not isinstance(a, PAdic) or not in_level(a, S.k):
                return False
        return S.holds([a.val for a in x])
    if isinstance(S, Product):
        n = arity(S.left)
        return member(S.left, x[:n]) and member(S.right, x[n:])
    if isinstance(S, TaggedUnion):
        (t,) = x
        if not isinstance(t, Tagged):
            return False
        try:
            inner = S.item(t.tag)
        except KeyError:
            return False
        return member(inner, t.point)
    if isinstance(S, Union):
        return any(member(s, x) for s in S.items)
    if isinstance(S, PipelineImage):
        from .atlas import image_member
        return image_member(S, x)
    raise TypeError(f"not a descriptor: {S!r}")


def _same(a, b) -> bool:
    if not isinstance(a, PAdic):
        return False
    if a.is_exact and b.is_exact:
        return a == b
    try:
        d = a - b
    except PrecisionError:
        raise IndeterminateError(f"cannot decide {a!r} == {b!r}")
    return d.is_zero


def _in_r_level(a, k: int) -> bool:
    return isinstance(a, PAdic) and not a.is_zero and a.val >= 0 and in_level(a, k)


def _cell_member(C: Cell1D, x) -> bool:
    if not isinstance(x, PAdic):
        return False
    try:
        y = x - C.c
    except PrecisionError:
        raise IndeterminateError("x - c vanishes to the known precision")
    if C.lam.is_zero:
        return y.is_zero
    if y.is_zero:
        return False
    lo, hi = C.window()
    if not lo <= y.val <= hi:
        return False
    return in_power_level(y / C.lam, C.n, C.level)


# -- dimension --------------------------------------------------------------

def cell_nonempty(C: Cell1D) -> bool:
    if C.lam.is_zero:
        return True
    lo, hi = C.window()
    if lo > hi:
        return False
    if lo == -INF or hi == INF:
        return True
    r = C.lam.val % C.n
    first = lo + (r - lo) % C.n
    return first <= hi


def polyset_nonempty(P: PolySet) -> bool:
    """Integer feasibility of the valuation inequalities (every valuation vector
    is realised by level-k points)."""
    return _feasible(P.ineqs, P.l)


def _feasible(rows, l: int) -> bool:
    if l == 0:
        return all(r[0] >= 0 for r in rows)
    if not rows:
        return True
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    A = np.array([r[1:] for r in rows], dtype=float)
    b = np.array([-r[0] for r in rows], dtype=float)
    res = milp(c=np.zeros(l), constraints=LinearConstraint(A, lb=b, ub=np.inf),
               integrality=np.ones(l), bounds=Bounds(-1e6, 1e6))
    if res.status == 0:
        vals = [int(round(v)) for v in res.x]
        return all(r[0] + sum(a * v for a, v in zip(r[1:], vals)) >= 0 for r in rows)
    return False


def dimension_of(S: SetDescriptor) -> int:
    if isinstance(S, Point):
        return 0
    if isinstance(S, Empty):
        return -1
    if isinstance(S, Space):
        return S.d
    if isinstance(S, Cell1D):
        if not cell_nonempty(S):
            return -1
        return 0 if S.lam.is_zero else 1
    if isinstance(S, LevelBox):
        return S.l
    if isinstance(S, PresentedCell):
        return dimension_of(S.polytope())
    if isinstance(S, PolySet):
        return S.l if polyset_nonempty(S) else -1
    if isinstance(S, Product):
        a, b = dimension_of(S.left), dimension_of(S.right)
        return -1 if min(a, b) < 0 else a + b
    if isinstance(S, (TaggedUnion, Union)):
        items = S.items if isinstance(S, Union) else [s for _, s in S.items]
        return max((dimension_of(s) for s in items), default=-1)
    if isinstance(S, PipelineImage):
        return dimension_of(S.source)
    raise TypeError(f"not a descriptor: {S!r}")


def finite_points(S: SetDescriptor) -> list[tuple]:
    """All points of a set of dimension <= 0."""
    if dimension_of(S) > 0:
        raise ValueError("set is infinite")
    if dimension_of(S) < 0:
        return []
    if isinstance(S, Point):
        return [S.coords]
    if isinstance(S, Cell1D):
        return [(S.c,)]
    if isinstance(S, LevelBox):
        return [()]
    if isinstance(S, Space):
        return [()]
    if isinstance(S, Product):
        return [a + b for a in finite_points(S.left) for b in finite_points(S.right)]
    if isinstance(S, TaggedUnion):
        return [(Tagged(t, pt),) for t, s in S.items for pt in finite_points(s)]
    if isinstance(S, Union):
        return [pt for s in S.items for pt in finite_points(s)]
    if isinstance(S, PipelineImage):
        from .atlas import run_steps
        return [run_steps(S.steps, pt) for pt in finite_points(S.source)]
    raise TypeError(f"no finite enumeration for {S!r}")


# -- cell normalisation and coset splitting ---------------------------------

def normalize_cell(C: Cell1D):
    """Isomorphic copies of C with c = 0 and a lower bound (sq1 = '<='), plus the
    pipelines onto C.  Cells with no bounds at all split at v = 0 first.

    Returns a list of (cell, IsoPipeline, sign) where sign is -1 when the
    pipeline inverts (attached exponents flip sign).
    """
    from .atlas import Invert, IsoPipeline, Translate
    if C.lam.is_zero:
        raise ValueError("lambda = 0: treat the cell as a point")
    p = C.p
    lo, hi = C.window()
    tail = [Translate(C.c)] if not C.c.is_zero else []
    pi = lambda s: scaled(p, 1, s)

    def cell(lo_, hi_, lam):
        return Cell1D(c=PAdic(p, 0), lam=lam, n=C.n, a1=pi(lo_), sq1=SQ_LE,
                      a2=None if hi_ == INF else pi(hi_),
                      sq2=SQ_NONE if hi_ == INF else SQ_LE, level=C.level)

    out = []
    if lo != -INF:
        out.append((cell(lo, hi, C.lam), IsoPipeline(None, C, tuple(tail)), 1))
        _attach_sources(out)
        return out
    inv = tuple([Invert()] + tail)
    if hi == INF:
        out.append((cell(0, INF, C.lam), IsoPipeline(None, C, tuple(tail)), 1))
        out.append((cell(1, INF, C.lam.inverse()), IsoPipeline(None, C, inv), -1))
    else:
        out.append((cell(-hi, INF, C.lam.inverse()), IsoPipeline(None, C, inv), -1))
    _attach_sources(out)
    return out


def _attach_sources(out):
    for i, (cell, pipe, sign) in enumerate(out):
        out[i] = (cell, pipe.with_source(cell), sign)


def coset_split(S: SetDescriptor, n: int, kp: int):
    """Partition S (a cell with c = 0, or R^(k)) into pieces gamma * P_n^(kp)
    within the valuation window of S.

    Returns [(gamma, piece)] where each piece is a Cell1D.
    """
    if isinstance(S, LevelBox):
        if S.l != 1:
            raise ValueError("coset_split works on one coordinate")
        raise ValueError("pass R^(k) as a Cell1D with level k and lower bound v(1)")
    if not isinstance(S, Cell1D) or not S.c.is_zero or S.lam.is_zero:
        raise ValueError("coset_split needs a centred cell with lambda != 0")
    if n % S.n:
        raise ValueError("n must be a multiple of the cell's n")
    p = S.p
    need = max(S.level, power_margin(p, S.n), power_margin(p, n), 1)
    if kp < need:
        raise ValueError(f"level {kp} too small to decide the cell's conditions (need {need})")
    lo, hi = S.window()
    if lo == -INF:
        raise ValueError("coset_split needs a lower valuation bound")
    m = p ** kp
    out = []
    for r in range(int(lo), int(lo) + n):
        if r > hi:
            break
        for u in range(1, m):
            if u % p == 0:
                continue
            gamma = scaled(p, u, r)
            if not member(S, (gamma,)):
                continue
            piece = Cell1D(c=PAdic(p, 0), lam=gamma, n=n, a1=S.a1, sq1=S.sq1,
                           a2=S.a2, sq2=S.sq2, level=kp)
            out.append((gamma, piece))
    return out
