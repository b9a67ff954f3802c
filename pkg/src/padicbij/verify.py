"""Independent checks: a residue enumeration oracle, samplers, and the
partition, bijection and valuation-law suites.

Every suite is deterministic given (seed, samples, window).  Random streams
are derived from string seeds, so reports are byte-identical across runs.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache

from .atlas import DomainError, run_steps, run_steps_backward
from .hensel import power_margin
from .padic import INF, PAdic, PrecisionError, agree, scaled, vp_int
from .sets import (Cell1D, Empty, LevelBox, PipelineImage, Point, PolySet, PresentedCell,
                   Product, SetDescriptor, Space, Tagged, TaggedUnion, Union, arity,
                   dimension_of, member)


class WindowError(ValueError):
    """A condition is not decided by residues at the chosen modulus."""


@dataclass(frozen=True)
class ResidueWindow:
    """Classes p^offset * (r + p^M R) with absolute valuation in [s_min, s_max]."""

    M: int
    s_min: int = 0
    s_max: int = 0
    offset: int = 0

    def __post_init__(self):
        if self.s_min > self.s_max:
            raise ValueError("empty valuation window")
        if self.s_min < self.offset or self.s_max - self.offset >= self.M:
            raise ValueError("window must lie inside [offset, offset + M)")


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""
    seconds: float | None = field(default=None, compare=False)

    def line(self, timing: bool = False) -> str:
        s = f"{'PASS' if self.passed else 'FAIL'} {self.name} checked={self.checked}"
        if self.detail:
            s += f" {self.detail}"
        if timing and self.seconds is not None:
            s += f" time={self.seconds:.2f}s"
        return s


def rng_for(seed, *labels) -> random.Random:
    return random.Random(":".join(map(str, (seed,) + labels)))


# -- residue oracle ---------------------------------------------------------

def class_residues(p: int, W: ResidueWindow) -> list[int]:
    """Residues r mod p^M whose class lies in the valuation window."""
    m = p ** W.M
    lo, hi = W.s_min - W.offset, W.s_max - W.offset
    return [r for r in range(1, m) if lo <= vp_int(r, p) <= hi]


def class_point(p: int, W: ResidueWindow, r: int, lift: int = 0) -> PAdic:
    return scaled(p, r + lift * p ** W.M, W.offset)


def _ball_decide(S: SetDescriptor, balls, p: int, W: ResidueWindow) -> bool:
    """Whether the product of balls lies in S (True) or misses it (False);
    WindowError if membership varies inside the balls."""
    a = W.offset + W.M      # every ball is y + p^a R
    if isinstance(S, Empty):
        return False
    if isinstance(S, Space):
        return True
    if isinstance(S, Point):
        for y, c in zip(balls, S.coords):
            if not c.is_zero and (c - y).val < a:
                return False
            if c.is_zero:
                return False     # 0 is never in a window class (classes avoid 0)
        raise WindowError("a point of the set lies inside a class")
    if isinstance(S, Cell1D):
        (y,) = balls
        d = y - S.c
        if d.is_zero or d.val >= a:
            raise WindowError("the cell centre lies inside a class")
        if S.lam.is_zero:
            return False
        need = max(S.level, power_margin(p, S.n))
        if a - d.val < need:
            raise WindowError(f"class radius decides {a - d.val} unit digits, need {need}")
        return member(S, (y,))
    if isinstance(S, (LevelBox, PolySet, PresentedCell)):
        k = S.k
        for y in balls:
            if a - y.val < k:
                raise WindowError(f"class radius decides {a - y.val} unit digits, need {k}")
        return member(S, tuple(balls))
    if isinstance(S, Product):
        n = arity(S.left)
        return _ball_decide(S.left, balls[:n], p, W) and _ball_decide(S.right, balls[n:], p, W)
    if isinstance(S, Union):
        return any(_ball_decide(T, balls, p, W) for T in S.items)
    raise WindowError(f"{type(S).__name__} is not residue-determined")


def enumerate_residues(S: SetDescriptor, W: ResidueWindow, p: int) -> frozenset:
    """All class tuples (one residue per coordinate) contained in S."""
    if isinstance(S, Empty):
        return frozenset()
    d = arity(S)
    res = class_residues(p, W)
    out = set()
    for rs in itertools.product(res, repeat=d):
        balls = tuple(class_point(p, W, r) for r in rs)
        if _ball_decide(S, balls, p, W):
            out.add(rs)
    return frozenset(out)


def check_partition(X: SetDescriptor, parts, W: ResidueWindow, p: int, lifts: int = 2,
                    seed=0, name="partition") -> CheckResult:
    """Disjointness and cover of X by parts on the residue grid.

    Set-level when X and every part are residue-determined; otherwise every
    class representative and ``lifts`` random lifts per class are checked
    pointwise (each point of X must lie in exactly one part, points outside X
    in none)."""
    t0 = time.perf_counter()
    parts = list(parts)
    try:
        sx = enumerate_residues(X, W, p)
        sp = [enumerate_residues(P, W, p) for P in parts]
    except WindowError:
        sx = None
    if sx is not None:
        seen = {}
        for i, s in enumerate(sp):
            for r in s:
                if r in seen:
                    return CheckResult(name, False, len(seen),
                                       f"overlap parts {seen[r]},{i} at residue {r}",
                                       time.perf_counter() - t0)
                seen[r] = i
        union = frozenset(seen)
        if union != sx:
            w = sorted(union ^ sx)[0]
            kind = "missing" if w in sx else "extra"
            return CheckResult(name, False, len(sx), f"{kind} residue {w}",
                               time.perf_counter() - t0)
        # classes avoid 0, so points with a zero coordinate are checked one by one
        d = arity(X)
        res = [0] + class_residues(p, W)
        checked = len(sx)
        for rs in itertools.product(res, repeat=d):
            if 0 not in rs:
                continue
            bad = _misplaced(X, parts, tuple(class_point(p, W, r) for r in rs))
            checked += 1
            if bad:
                return CheckResult(name, False, checked, bad, time.perf_counter() - t0)
        return CheckResult(name, True, checked, "mode=set", time.perf_counter() - t0)
    rng = rng_for(seed, name)
    d = arity(X)
    res = [0] + class_residues(p, W)
    checked = 0
    for rs in itertools.product(res, repeat=d):
        for j in range(lifts + 1):
            lift = [0] * d if j == 0 else [rng.randrange(p ** 6) for _ in range(d)]
            x = tuple(class_point(p, W, r, t) for r, t in zip(rs, lift))
            bad = _misplaced(X, parts, x)
            checked += 1
            if bad:
                return CheckResult(name, False, checked, bad, time.perf_counter() - t0)
    return CheckResult(name, True, checked, "mode=pointwise", time.perf_counter() - t0)


def _misplaced(X, parts, x) -> str:
    """Empty if x lies in exactly one part when x is in X and in none otherwise."""
    inside = member(X, x)
    hits = [i for i, P in enumerate(parts) if member(P, x)]
    if len(hits) != (1 if inside else 0):
        return f"point {x} in X={inside} lies in parts {hits}"
    return ""


def residue_grid(S: SetDescriptor, p: int, W: ResidueWindow) -> list[tuple]:
    """Class representatives (and 0) for every coordinate of S; tagged unions
    contribute one copy of the grid of each item."""
    if isinstance(S, TaggedUnion):
        return [(Tagged(t, x),) for t, T in S.items for x in residue_grid(T, p, W)]
    if isinstance(S, Product):
        return [a + b for a in residue_grid(S.left, p, W) for b in residue_grid(S.right, p, W)]
    reps = [PAdic(p, 0)] + [class_point(p, W, r) for r in class_residues(p, W)]
    return list(itertools.product(reps, repeat=arity(S)))


def check_transport(P, W: ResidueWindow, p: int, name="transport") -> CheckResult:
    """x in source iff forward(x) in target, and y in target iff backward(y) in
    source, over the residue grid (points outside a step's domain are skipped)."""
    t0 = time.perf_counter()
    checked = 0
    for label, dom, cod, go in (("fwd", P.source, P.target, run_steps),
                                ("bwd", P.target, P.source, run_steps_backward)):
        for x in residue_grid(dom, p, W):
            try:
                y = go(P.steps, x)
            except (DomainError, ZeroDivisionError):
                if member(dom, x):
                    return CheckResult(name, False, checked, f"{label} undefined at {x}",
                                       time.perf_counter() - t0)
                continue
            checked += 1
            if member(dom, x) != member(cod, y):
                return CheckResult(name, False, checked,
                                   f"{label}: {x} -> {y} changes membership",
                                   time.perf_counter() - t0)
    return CheckResult(name, True, checked, "", time.perf_counter() - t0)


def residue_census(points, p: int, M: int) -> dict:
    """Counts of (valuation, unit residue mod p^M) over points of R minus 0."""
    out = {}
    for x in points:
        key = (x.val, x.unit_residue(M))
        out[key] = out.get(key, 0) + 1
    return out


# -- sampling ---------------------------------------------------------------

DIGITS = 12


def _geometric(rng: random.Random, cap: int = 40) -> int:
    n = 0
    while n < cap and rng.random() < 0.5:
        n += 1
    return n


def _unit(p: int, rng: random.Random, k: int = 0, digits: int = DIGITS) -> int:
    """Random unit mod p^digits; congruent to 1 mod p^k when k >= 1."""
    if k >= 1:
        return 1 + p ** k * rng.randrange(p ** max(digits - k, 1))
    lead = rng.randrange(1, p)
    return lead + p * rng.randrange(p ** (digits - 1))


def _value(p: int, s: int, u: int) -> PAdic:
    return scaled(p, u, s)


def _two_sided(rng):
    g = _geometric(rng)
    return g if rng.random() < 0.5 else -g - 1


def sample_point(S: SetDescriptor, p: int, rng: random.Random, tries: int = 200) -> tuple:
    """One point of S (structured proposal, then rejection against member)."""
    for _ in range(tries):
        x = _propose(S, p, rng)
        if x is not None and member(S, x):
            return x
    raise ValueError(f"sampler found no point of {type(S).__name__} in {tries} tries")


def _propose(S, p, rng):
    if isinstance(S, Point):
        return S.coords
    if isinstance(S, Space):
        return tuple(PAdic(p, 0) if rng.random() < 1 / 16 else
                     _value(p, _two_sided(rng), _unit(p, rng)) for _ in range(S.d))
    if isinstance(S, LevelBox):
        return tuple(_value(p, _geometric(rng), _unit(p, rng, S.k)) for _ in range(S.l))
    if isinstance(S, Cell1D):
        return (_propose_cell(S, p, rng),)
    if isinstance(S, PresentedCell):
        return _propose(S.polytope(), p, rng)
    if isinstance(S, PolySet):
        vals = _polyset_valuations(S, rng)
        if vals is None:
            return None
        return tuple(_value(p, v, _unit(p, rng, S.k)) for v in vals)
    if isinstance(S, Product):
        a, b = _propose(S.left, p, rng), _propose(S.right, p, rng)
        return None if a is None or b is None else a + b
    if isinstance(S, Union):
        items = [T for T in S.items if dimension_of(T) >= 0]
        return sample_point(rng.choice(items), p, rng)
    if isinstance(S, TaggedUnion):
        items = [(t, T) for t, T in S.items if dimension_of(T) >= 0]
        t, T = rng.choice(items)
        return (Tagged(t, sample_point(T, p, rng)),)
    if isinstance(S, PipelineImage):
        return run_steps(S.steps, sample_point(S.source, p, rng))
    raise ValueError(f"no sampler for {type(S).__name__}")


def _propose_cell(C: Cell1D, p, rng):
    if C.lam.is_zero:
        return C.c
    lo, hi = C.window()
    n = C.n
    if lo != -INF:
        s = int(lo) + _geometric(rng)
        if hi != INF and s > hi:
            s = int(lo) + rng.randrange(int(hi) - int(lo) + 1)
    elif hi != INF:
        s = int(hi) - _geometric(rng)
    else:
        s = _two_sided(rng)
    # v(x - c) = s must be congruent to v(lam) mod n
    s -= (s - C.lam.val) % n
    if lo != -INF and s < lo:
        s += n
    if rng.random() < 0.5 or C.level == 0:
        z = _unit(p, rng, 0)
        u = pow(z, n) * (1 + p ** (power_margin(p, n) or 1) * rng.randrange(p ** 4))
    else:
        u = pow(_unit(p, rng, C.level), n)
    w = scaled(p, u, s - C.lam.val)
    return C.c + C.lam * w


@lru_cache(maxsize=1024)
def _polyset_anchor(P: PolySet):
    from .sets import polyset_nonempty
    if not polyset_nonempty(P):
        return None
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    if P.l == 0:
        return ()
    if not P.ineqs:
        return (0,) * P.l
    A = np.array([r[1:] for r in P.ineqs], dtype=float)
    b = np.array([-r[0] for r in P.ineqs], dtype=float)
    # minimise the sum of |v| via a small L1 objective on a shifted copy
    res = milp(c=np.ones(P.l) * 1e-3, constraints=LinearConstraint(A, lb=b, ub=np.inf),
               integrality=np.ones(P.l), bounds=Bounds(-1e4, 1e4))
    if res.status != 0:
        return None
    return tuple(int(round(v)) for v in res.x)


def _polyset_valuations(P: PolySet, rng):
    anchor = _polyset_anchor(P)
    if anchor is None:
        return None
    for _ in range(50):
        v = tuple(a + _two_sided(rng) if rng.random() < 0.8 else a for a in anchor)
        if P.holds(v):
            return v
    return anchor


# -- suites -----------------------------------------------------------------

def _same_point(x, y) -> bool:
    if len(x) != len(y):
        return False
    for a, b in zip(x, y):
        if isinstance(a, Tagged) or isinstance(b, Tagged):
            if not (isinstance(a, Tagged) and isinstance(b, Tagged) and a.tag == b.tag
                    and _same_point(a.point, b.point)):
                return False
        elif a.is_exact and b.is_exact:
            if a != b:
                return False
        elif not agree(a, b, 12):
            return False
    return True


def check_bijection(P, samples: int, seed=0, name=None, source_sampler=None,
                    target_sampler=None, p: int | None = None) -> CheckResult:
    """Forward lands in the target and inverts exactly; symmetrically backward."""
    t0 = time.perf_counter()
    name = name or "bijection"
    p = p or _pipeline_prime(P)
    checked = 0
    for direction, dom, cod, go, back, sampler in (
            ("fwd", P.source, P.target, run_steps, run_steps_backward, source_sampler),
            ("bwd", P.target, P.source, run_steps_backward, run_steps, target_sampler)):
        rng = rng_for(seed, name, direction)
        for i in range(samples):
            x = sampler(rng) if sampler else sample_point(dom, p, rng)
            try:
                y = go(P.steps, x)
                if not member(cod, y):
                    return CheckResult(name, False, checked,
                                       f"{direction} image of {x} = {y} not in codomain",
                                       time.perf_counter() - t0)
                x2 = back(P.steps, y)
            except (DomainError, PrecisionError, ZeroDivisionError) as e:
                return CheckResult(name, False, checked, f"{direction} at {x}: {e}",
                                   time.perf_counter() - t0)
            if not _same_point(x, x2):
                return CheckResult(name, False, checked,
                                   f"{direction} round trip {x} -> {y} -> {x2}",
                                   time.perf_counter() - t0)
            checked += 1
    return CheckResult(name, True, checked, "", time.perf_counter() - t0)


def _pipeline_prime(P) -> int:
    from .atlas import steps_prime
    from .rectilinear import descriptor_prime
    q = (descriptor_prime(P.source) or descriptor_prime(P.target)
         or steps_prime(P.steps) or steps_prime((P.source, P.target)))
    if q is None:
        raise ValueError("cannot determine the prime of the pipeline")
    return q


def check_valuation_law(part, samples: int, seed=0, name="valuation-law",
                        p: int | None = None) -> CheckResult:
    """e_j * v(beta'_j prod y^mu'_j) == v(beta_j prod (f(y) - c)^mu_j) exactly."""
    t0 = time.perf_counter()
    p = p or _pipeline_prime(part.pipeline)
    rng = rng_for(seed, name)
    checked = 0
    for f in part.forms:
        if f.e != 1:
            return CheckResult(name, False, 0, f"emitted form has e={f.e}")
    for _ in range(samples):
        y = sample_point(part.box, p, rng)
        x = run_steps(part.pipeline.steps, y)
        for j, (orig, new) in enumerate(zip(part.source_forms, part.forms)):
            lhs = orig.valuation_times_e(x, part.centers)
            rhs = new.valuation_times_e(y)
            rhs = rhs * orig.e if rhs != INF else INF
            if lhs != rhs:
                return CheckResult(name, False, checked,
                                   f"form {j} at y={y}: {lhs} != {rhs}",
                                   time.perf_counter() - t0)
        checked += 1
        if part.box.l == 0:
            break
    return CheckResult(name, True, checked, "", time.perf_counter() - t0)


def check_finite(X: SetDescriptor, points, W: ResidueWindow, p: int,
                 name="finite") -> CheckResult:
    """The point list equals X: every listed point is in X, they are distinct,
    and every residue-grid point of X is listed."""
    pts = list(points)
    for x in pts:
        if not member(X, x):
            return CheckResult(name, False, 0, f"{x} not in X")
    if len(set(pts)) != len(pts):
        return CheckResult(name, False, 0, "duplicate points")
    d = arity(X)
    res = [0] + class_residues(p, W)
    checked = 0
    listed = set(pts)
    for rs in itertools.product(res, repeat=d):
        x = tuple(class_point(p, W, r) for r in rs)
        checked += 1
        if member(X, x) and x not in listed:
            return CheckResult(name, False, checked, f"{x} in X but not listed")
    return CheckResult(name, True, checked, f"points={len(pts)}")
