"""Partition descriptors into images of level boxes prod R^(k) with attached
functions in exact monomial valuation form.

Internally a part is a ``Piece``: a level box, the steps mapping it into the
input set, and an affine valuation table.  Row i of the table is (c_i, A_i)
with v(x_i - center_i) = c_i + A_i . v(y) for every y in the box.  All the
maps used (scalings, power maps, monomial twists, inversions, balls around a
point) keep valuations affine, so forms are pulled back by integer algebra.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .atlas import (Block, Constant, CoordinateMap, Invert, IsoPipeline, IsoStep,
                    MonomialTwist, Permute, PowerCoset, Scale, Tag, Translate, simplify)
from .hensel import power_margin
from .padic import INF, PAdic, scaled, vp_int
from .sets import (Cell1D, Empty, LevelBox, MonomialForm, PipelineImage, Point,
                   PolySet, PresentedCell, Product, SetDescriptor, Space, TaggedUnion,
                   Union, arity, cell_nonempty, centers, coset_split, normalize_cell,
                   polyset_nonempty)


class FormError(ValueError):
    """A form does not define an integer valuation on the set."""


@dataclass(frozen=True)
class RectPart:
    part: SetDescriptor
    box: LevelBox
    pipeline: IsoPipeline
    forms: tuple[MonomialForm, ...]
    # the input forms and centres, so the valuation law can be re-checked
    source_forms: tuple[MonomialForm, ...] = ()
    centers: tuple[PAdic, ...] = ()


@dataclass(frozen=True)
class Piece:
    l: int
    k: int
    steps: tuple[IsoStep, ...]
    rows: tuple[tuple[float, tuple[int, ...]], ...] | None


def _pi(p: int, s: int) -> PAdic:
    return scaled(p, 1, s)


def _identity_rows(l: int):
    return tuple((0, tuple(1 if j == i else 0 for j in range(l))) for i in range(l))


def _compose_rows(outer, inner, width: int):
    """outer: rows over the mid variables; inner: mid variables over the box."""
    if outer is None or inner is None:
        return None
    out = []
    for c, A in outer:
        cc = c
        AA = [0] * width
        for a, (ci, Ai) in zip(A, inner):
            if a == 0:
                continue
            cc = cc + a * ci
            for j, x in enumerate(Ai):
                AA[j] += a * x
        out.append((cc, tuple(AA)))
    return tuple(out)


def _with_steps(piece: Piece, steps, rows, width_rows=None) -> Piece:
    """Append steps after piece.steps; rows map the old outputs to the new ones."""
    return Piece(piece.l, piece.k, piece.steps + tuple(steps),
                 _compose_rows(rows, piece.rows, piece.l))


def level_classes(p: int, k: int, K: int) -> list[int]:
    """Units mod p^K congruent to 1 mod p^k (so R^(k) is the union of gamma R^(K))."""
    return [1 + p ** k * t for t in range(p ** (K - k))] if K > k else [1]


def refine(piece: Piece, K: int, p: int) -> list[Piece]:
    """Split the box R^(k)^l into translates gamma R^(K)^l."""
    if piece.l == 0 or piece.k >= K:
        return [Piece(piece.l, max(piece.k, K) if piece.l == 0 else piece.k,
                      piece.steps, piece.rows)]
    out = []
    for gammas in itertools.product(level_classes(p, piece.k, K), repeat=piece.l):
        if all(g == 1 for g in gammas):
            pre = ()
        else:
            pre = (CoordinateMap(tuple(Block(1, 1, () if g == 1 else (Scale(PAdic(p, g)),))
                                       for g in gammas)),)
        out.append(Piece(piece.l, K, pre + piece.steps, piece.rows))
    return out


def product(a: Piece, wa: int, b: Piece, wb: int, p: int) -> list[Piece]:
    """Pieces of A x B from a piece of A (output width wa) and one of B."""
    levels = [x.k for x in (a, b) if x.l > 0]
    K = max(levels) if levels else 1
    out = []
    for ra in refine(a, K, p):
        for rb in refine(b, K, p):
            blocks = (Block(ra.l, wa, ra.steps), Block(rb.l, wb, rb.steps))
            steps = (CoordinateMap(blocks),) if ra.steps or rb.steps else ()
            rows = None
            if ra.rows is not None and rb.rows is not None:
                l = ra.l + rb.l
                rows = tuple((c, A + (0,) * rb.l) for c, A in ra.rows) + \
                    tuple((c, (0,) * ra.l + A) for c, A in rb.rows)
                assert all(len(A) == l for _, A in rows)
            out.append(Piece(ra.l + rb.l, K, steps, rows))
    return out


def product_all(pa, wa, pb, wb, p):
    return [q for a in pa for b in pb for q in product(a, wa, b, wb, p)]


def r_piece(k: int) -> Piece:
    """R^(k) itself."""
    return Piece(1, k, (), _identity_rows(1))


def _in_block(steps, width_in, width_out, index, total):
    """Wrap steps acting on coordinates [index, index+width_in) of a point."""
    blocks = []
    if index:
        blocks.append(Block(index, index, ()))
    blocks.append(Block(width_in, width_out, tuple(steps)))
    rest = total - index - width_in
    if rest:
        blocks.append(Block(rest, rest, ()))
    return CoordinateMap(tuple(blocks))


# -- one-variable cells -----------------------------------------------------

def rect_cell_pieces(C: Cell1D, nprime_base: int = 1) -> list[Piece]:
    """Pieces of a cell; rows describe v(x - c).  ``nprime_base`` is folded
    into the power map of unbounded cells (lcm with the e's of the forms)."""
    if C.lam.is_zero:
        return [Piece(0, 1, (Constant((C.c,)),), ((INF, ()),))]
    if not cell_nonempty(C):
        return []
    out = []
    for cell, pipe, sign in normalize_cell(C):
        flip = ((0, (sign,)),)
        for pc in _normalized_pieces(cell, nprime_base):
            out.append(_with_steps(pc, pipe.steps, flip))
    return out


def _normalized_pieces(C: Cell1D, nprime_base: int) -> list[Piece]:
    p = C.p
    lo, hi = C.window()
    lo = int(lo)
    if hi != INF:
        hi = int(hi)
        s = hi + max(1, C.level, power_margin(p, C.n))
        out = []
        for t in range(lo, hi + 1):
            m = p ** (s - t)
            for u in range(1, m):
                if u % p == 0:
                    continue
                y = scaled(p, u, t)
                if not _member_cell(C, y):
                    continue
                out.append(Piece(0, 1, (Constant((y,)),), ((t, ()),)))
                for g in range(1, p):
                    steps = (Scale(PAdic(p, g) * _pi(p, s)), Translate(y))
                    out.append(Piece(1, 1, steps, ((t, (0,)),)))
        return out
    nprime = C.n * nprime_base // math.gcd(C.n, nprime_base)
    e = vp_int(nprime, p)
    k = max(e + 1, C.level - e)
    out = []
    for gamma, _ in coset_split(C, nprime, k + e):
        step = PowerCoset(gamma, nprime, k)
        out.append(Piece(1, k, (step,), ((gamma.val, (nprime,)),)))
    return out


def _member_cell(C, y):
    from .sets import member
    return member(C, (y,))


def rectilinearize_1d(C: Cell1D, forms=()) -> list[RectPart]:
    forms = tuple(forms)
    n0 = 1
    for f in forms:
        n0 = n0 * f.e // math.gcd(n0, f.e)
    pieces = rect_cell_pieces(C, n0)
    return _finish(C, pieces, forms)


# -- valuation polytopes ----------------------------------------------------

def _ensure_level(P: PolySet, p: int):
    """Pieces (PolySet at level >= 1, prefix steps) covering P when k = 0."""
    if P.k >= 1:
        return [(P, ())]
    out = []
    for gammas in itertools.product(range(1, p), repeat=P.l):
        pre = (CoordinateMap(tuple(Block(1, 1, (Scale(PAdic(p, g)),)) for g in gammas)),)
        out.append((PolySet(P.l, 1, P.ineqs), pre))
    return out


def rect_poly(P: PolySet, p: int) -> list[Piece]:
    out = []
    for Q, pre in _ensure_level(P, p):
        for pc in _rect_poly(Q, p):
            out.append(Piece(pc.l, pc.k, pc.steps + pre, pc.rows))
    return out


def _rect_poly(P: PolySet, p: int) -> list[Piece]:
    l, k = P.l, P.k
    if not polyset_nonempty(P):
        return []
    if l == 0:
        return [Piece(0, k, (), ())]
    last = [r for r in P.ineqs if r[l] != 0]
    base = [r[:l] for r in P.ineqs if r[l] == 0]
    d = 1
    for r in last:
        d = d * abs(r[l]) // math.gcd(d, abs(r[l]))
    if d > 1:
        return _power_reduce(P, d, p)
    lowers = [r for r in last if r[l] > 0]
    uppers = [r for r in last if r[l] < 0]
    if not lowers:
        # invert the last coordinate; with no bounds at all split at v = 0 first
        flipped = tuple(r[:l] + (-r[l],) for r in P.ineqs)
        inv = _in_block((Invert(),), 1, 1, l - 1, l)
        neg = _identity_rows(l)[:-1] + ((0, (0,) * (l - 1) + (-1,)),)
        out = []
        if not uppers:
            at_zero = PolySet(l, k, P.ineqs + ((0,) * l + (1,),))
            out.extend(_rect_poly(at_zero, p))
            flipped += ((-1,) + (0,) * (l - 1) + (1,),)
        for pc in _rect_poly(PolySet(l, k, flipped), p):
            out.append(_with_steps(pc, (inv,), neg))
        return out
    out = []
    for ri, lo in enumerate(lowers):
        for si, up in enumerate(uppers or [None]):
            rows = list(base)
            lam = (-lo[0],) + tuple(-a for a in lo[1:l])   # v(x_l) >= lam(v)
            for rj, other in enumerate(lowers):
                if rj == ri:
                    continue
                o = (-other[0],) + tuple(-a for a in other[1:l])
                strict = 1 if rj < ri else 0
                rows.append(tuple(a - b for a, b in zip(lam, o)))
                rows[-1] = (rows[-1][0] - strict,) + rows[-1][1:]
            ub = None
            if up is not None:
                ub = up[:l]                                   # v(x_l) <= ub(v)
                for sj, other in enumerate(uppers):
                    if sj == si:
                        continue
                    strict = 1 if sj < si else 0
                    row = tuple(a - b for a, b in zip(other[:l], ub))
                    rows.append((row[0] - strict,) + row[1:])
                rows.append(tuple(a - b for a, b in zip(ub, lam)))
            B = PolySet(l - 1, k, tuple(rows))
            if not polyset_nonempty(B):
                continue
            out.extend(_fibre_over(B, lam, ub, k, p))
    return out


def _fibre_over(B: PolySet, lam, ub, k: int, p: int) -> list[Piece]:
    """Pieces of {(x', x_l) : x' in B, lam(v') <= v(x_l) [<= ub(v')], x_l in K^(k)}."""
    l = B.l + 1
    out = []
    for bp in _rect_poly(B, p):
        C_lam = lam[0] + sum(a * c for a, (c, _) in zip(lam[1:], bp.rows))
        mu_lam = _pull(lam[1:], bp.rows, bp.l)
        K = max(k, bp.k) if bp.l else k
        if ub is None:
            e_pieces = [Piece(bp.l + 1, K, (), _identity_rows(bp.l + 1))]
        else:
            C_ub = ub[0] + sum(a * c for a, (c, _) in zip(ub[1:], bp.rows))
            mu_ub = _pull(ub[1:], bp.rows, bp.l)
            nu = tuple(a - b for a, b in zip(mu_ub, mu_lam))
            e_pieces = rect_E(bp.l, K, C_ub - C_lam, nu, p)
        twist = MonomialTwist(bp.l, _pi(p, C_lam), tuple(mu_lam) + (0,))
        twist_rows = _identity_rows(bp.l) + ((C_lam, tuple(mu_lam) + (1,)),)
        for rb in refine(bp, K, p):
            for g in level_classes(p, k, K):
                zscale = () if g == 1 else (_in_block((Scale(PAdic(p, g)),), 1, 1, bp.l, bp.l + 1),)
                tail = zscale + (twist,)
                if rb.steps:
                    tail += (CoordinateMap((Block(bp.l, l - 1, rb.steps), Block(1, 1, ()))),)
                rows = _compose_rows(
                    tuple((c, A + (0,)) for c, A in bp.rows) + ((0, (0,) * bp.l + (1,)),),
                    twist_rows, bp.l + 1)
                for ep in e_pieces:
                    out.append(_with_steps(ep, tail, rows))
    return out


def _pull(coeffs, rows, width):
    mu = [0] * width
    for a, (_, A) in zip(coeffs, rows):
        for j, x in enumerate(A):
            mu[j] += a * x
    return mu


def _power_reduce(P: PolySet, d: int, p: int) -> list[Piece]:
    """Substitute x_i = gamma_i w_i^d on the base so every x_l coefficient is +-1."""
    l, k = P.l, P.k
    e = vp_int(d, p)
    kt = max(k, e + 1)
    kp = kt + e
    units = level_classes(p, k, kp)
    gammas = [(r, u) for r in range(d) for u in units]
    out = []
    for choice in itertools.product(gammas, repeat=l - 1):
        rows = []
        for r in P.ineqs:
            a0 = r[0] + sum(a * g[0] for a, g in zip(r[1:l], choice))
            coeffs = tuple(d * a for a in r[1:l])
            m = abs(r[l]) if r[l] else 1
            rows.append((a0 // m,) + tuple(a // m for a in coeffs) + (r[l] // m,))
        Q = PolySet(l, kt, tuple(rows))
        blocks = tuple(Block(1, 1, (PowerCoset(PAdic(p, u) * _pi(p, r), d, kt),))
                       for r, u in choice)
        vrows = tuple((r, tuple(d if j == i else 0 for j in range(l)))
                      for i, (r, _) in enumerate(choice)) + ((0, (0,) * (l - 1) + (1,)),)
        for g in level_classes(p, k, kt):
            last = () if g == 1 else (Scale(PAdic(p, g)),)
            step = CoordinateMap(blocks + (Block(1, 1, last),))
            for pc in _rect_poly(Q, p):
                out.append(_with_steps(pc, (step,), vrows))
    return out


# -- the monomially bounded sets E ------------------------------------------

def rect_E(l: int, k: int, c: int, nu: tuple[int, ...], p: int) -> list[Piece]:
    """Pieces of E = {(y, z) in R^(k)^(l+1) : v(z) <= c + nu . v(y)}."""
    return list(_rect_E(l, k, c, tuple(nu), p))


@lru_cache(maxsize=4096)
def _rect_E(l, k, c, nu, p):
    if all(x <= 0 for x in nu):
        return tuple(split_nonpositive(l, k, c, nu, p))
    i = next(j for j, x in enumerate(nu) if x > 0)
    if i != 0:
        perm = list(range(l + 1))
        perm[0], perm[i] = perm[i], perm[0]
        nu2 = list(nu)
        nu2[0], nu2[i] = nu2[i], nu2[0]
        step = Permute(tuple(perm))
        rows = tuple((0, tuple(1 if j == perm[r] else 0 for j in range(l + 1)))
                     for r in range(l + 1))
        return tuple(_with_steps(pc, (step,), rows) for pc in _rect_E(l, k, c, tuple(nu2), p))
    if nu[0] > 1:
        return tuple(reduce_leading_exponent(l, k, c, nu, p))
    return tuple(split_E1_E2(l, k, c, nu, p))


def annulus_pieces(k: int, s: int, p: int) -> list[Piece]:
    """{z in R^(k) : v(z) = s} = {p^s} u union_g (p^s + p^(s+k) g R^(1))."""
    ps = _pi(p, s)
    out = [Piece(0, 1, (Constant((ps,)),), ((s, ()),))]
    for g in range(1, p):
        out.append(Piece(1, 1, (Scale(PAdic(p, g) * _pi(p, s + k)), Translate(ps)),
                         ((s, (0,)),)))
    return out


def split_nonpositive(l: int, k: int, c: int, nu, p: int) -> list[Piece]:
    """Fibre E over s = v(z) in 0..c; every nu_i <= 0."""
    out = []
    for s in range(0, c + 1):
        rows = tuple(_unit(l, i) for i in range(l)) + ((c - s,) + tuple(nu),)
        base = rect_poly(PolySet(l, k, rows), p)
        out.extend(product_all(base, l, annulus_pieces(k, s, p), 1, p))
    return out


def _unit(l, i):
    return (0,) + tuple(1 if j == i else 0 for j in range(l))


def split_E1_E2(l: int, k: int, c: int, nu, p: int) -> list[Piece]:
    """nu_1 = 1.  E1: v(z) < c + nu''.v(y''), a product with R^(k) in y_1.
    E2: the complement, the image of R^(k) x D under
    (w, y'', z) -> (w z / (p^c prod y_i^nu_i), y'', z)."""
    if nu[0] != 1:
        raise ValueError("split_E1_E2 needs a leading exponent 1")
    rest = tuple(nu[1:])
    e1 = product_all([r_piece(k)], 1, rect_E(l - 1, k, c - 1, rest, p), l, p)
    # D = {(y'', z) in R^(k)^l : v(z) >= c + rest . v(y'')}
    drows = tuple(_unit(l, i) for i in range(l)) + ((-c,) + tuple(-x for x in rest) + (1,),)
    dpieces = rect_poly(PolySet(l, k, drows), p)
    twist = MonomialTwist(0, _pi(p, -c), (0,) + tuple(-x for x in rest) + (1,))
    trows = ((-c, (1,) + tuple(-x for x in rest) + (1,)),) + \
        tuple((0, tuple(1 if j == i else 0 for j in range(l + 1))) for i in range(1, l + 1))
    e2 = [_with_steps(pc, (twist,), trows)
          for pc in product_all([r_piece(k)], 1, dpieces, l, p)]
    return e1 + e2


def reduce_leading_exponent(l: int, k: int, c: int, nu, p: int) -> list[Piece]:
    """nu_1 > 1: (y_1, y_i, z) = (a_1 w_1, a_i w_i^nu_1, a_z w_z^nu_1) gives
    bounds with leading exponent 1."""
    d = nu[0]
    if d <= 1:
        raise ValueError("needs nu_1 > 1")
    e = vp_int(d, p)
    kt = max(k, e + 1)
    kp = kt + e
    firsts = level_classes(p, k, kt)
    others = [(r, u) for r in range(d) for u in level_classes(p, k, kp)]
    out = []
    for a1 in firsts:
        for choice in itertools.product(others, repeat=l):
            ys, (rz, _) = choice[:-1], choice[-1]
            c2 = c + sum(n * r for n, (r, _) in zip(nu[1:], ys)) - rz
            c2 = c2 // d
            nu2 = (1,) + tuple(nu[1:])
            blocks = [Block(1, 1, () if a1 == 1 else (Scale(PAdic(p, a1)),))]
            blocks += [Block(1, 1, (PowerCoset(PAdic(p, u) * _pi(p, r), d, kt),))
                       for r, u in choice]
            rows = ((0, (1,) + (0,) * l),) + tuple(
                (r, tuple(d if j == i + 1 else 0 for j in range(l + 1)))
                for i, (r, _) in enumerate(choice))
            for pc in rect_E(l, kt, c2, nu2, p):
                out.append(_with_steps(pc, (CoordinateMap(tuple(blocks)),), rows))
    return out


# -- driver -----------------------------------------------------------------

def _pieces(X: SetDescriptor, p: int, n0: int) -> list[Piece]:
    if isinstance(X, Empty):
        return []
    if isinstance(X, Point):
        rows = tuple((x.val, ()) for x in X.coords)
        return [Piece(0, 1, (Constant(X.coords),), rows)]
    if isinstance(X, Cell1D):
        return rect_cell_pieces(X, n0)
    if isinstance(X, LevelBox):
        if X.k < 1:
            return rect_poly(PolySet(X.l, 0, tuple(_unit(X.l, i) for i in range(X.l))), p)
        return [Piece(X.l, X.k, (), _identity_rows(X.l))]
    if isinstance(X, Space):
        out = [Piece(0, 1, (), ())]
        zero = PAdic(p, 0)
        line = rect_cell_pieces(Cell1D(c=zero, lam=zero), n0) + \
            rect_cell_pieces(Cell1D(c=zero, lam=PAdic(p, 1)), n0)
        for i in range(X.d):
            out = product_all(out, i, line, 1, p)
        return out
    if isinstance(X, PresentedCell):
        return rect_poly(X.polytope(), p)
    if isinstance(X, PolySet):
        return rect_poly(X, p)
    if isinstance(X, Product):
        return product_all(_pieces(X.left, p, n0), arity(X.left),
                           _pieces(X.right, p, n0), arity(X.right), p)
    if isinstance(X, Union):
        return [pc for S in X.items for pc in _pieces(S, p, n0)]
    if isinstance(X, TaggedUnion):
        return [Piece(pc.l, pc.k, pc.steps + (Tag(t),), None)
                for t, S in X.items for pc in _pieces(S, p, n0)]
    if isinstance(X, PipelineImage):
        return [Piece(pc.l, pc.k, pc.steps + tuple(X.steps), None)
                for pc in _pieces(X.source, p, n0)]
    raise TypeError(f"cannot rectilinearize {X!r}")


def descriptor_prime(X: SetDescriptor) -> int | None:
    """The prime of the first PAdic found in the descriptor data."""
    if isinstance(X, Point):
        return X.coords[0].p if X.coords else None
    if isinstance(X, Cell1D):
        return X.c.p
    if isinstance(X, PresentedCell):
        for b in (X.upper, X.lower):
            if b is not None:
                return b.beta.p
        return None
    if isinstance(X, Product):
        return descriptor_prime(X.left) or descriptor_prime(X.right)
    if isinstance(X, Union):
        return next((q for q in map(descriptor_prime, X.items) if q), None)
    if isinstance(X, TaggedUnion):
        return next((q for q in (descriptor_prime(s) for _, s in X.items) if q), None)
    if isinstance(X, PipelineImage):
        from .atlas import steps_prime
        return descriptor_prime(X.source) or steps_prime(X.steps)
    return None


def rectilinearize(X: SetDescriptor, forms=(), p: int | None = None) -> list[RectPart]:
    """Parts of X, each the image of a level box, with forms reduced to e = 1."""
    p = p or descriptor_prime(X)
    if p is None:
        raise ValueError("the prime cannot be read off the descriptor; pass p")
    forms = tuple(forms)
    for f in forms:
        if len(f.mu) != arity(X):
            raise ValueError(f"form exponent vector must have length {arity(X)}")
    n0 = 1
    for f in forms:
        n0 = n0 * f.e // math.gcd(n0, f.e)
    return _finish(X, _pieces(X, p, n0), forms, p)


def _finish(X, pieces, forms, p=None) -> list[RectPart]:
    p = p or descriptor_prime(X)
    out = []
    for pc in pieces:
        if forms and pc.rows is None:
            raise ValueError("forms are not supported on tagged unions or images")
        for q, fs in _normalize_forms(pc, forms, p):
            box = LevelBox(q.l, q.k)
            hint = None if q.rows is None else (centers(X, p), q.rows)
            steps = simplify(q.steps)
            part = PipelineImage(box, steps, arity(X), hint)
            out.append(RectPart(part, box, IsoPipeline(box, part, steps), fs,
                                forms, centers(X, p)))
    return out


def _pulled(pc: Piece, f: MonomialForm):
    """(C, mu') with e * v(b(f(y))) = C + mu' . v(y) on the piece."""
    if f.beta.is_zero:
        return INF, (0,) * pc.l
    C = f.beta.val
    mu = [0] * pc.l
    for m, (c, A) in zip(f.mu, pc.rows):
        if m == 0:
            continue
        if c == INF:
            if m < 0:
                raise FormError("negative power of a coordinate vanishing on a part")
            return INF, (0,) * pc.l
        C += m * c
        for j, a in enumerate(A):
            mu[j] += m * a
    return C, tuple(mu)


def _normalize_forms(pc: Piece, forms, p: int):
    if not forms:
        return [(pc, ())]
    data = [(f.e, *_pulled(pc, f)) for f in forms]
    if all(all(m % e == 0 for m in mu) for e, _, mu in data):
        return [(pc, tuple(_reduced(e, C, mu, p) for e, C, mu in data))]
    # power split every box coordinate by the lcm of the e's
    n = 1
    for e, _, _ in data:
        n = n * e // math.gcd(n, e)
    ev = vp_int(n, p)
    kt = max(ev + 1, pc.k - ev)
    kp = kt + ev
    gammas = [(r, u) for r in range(n) for u in level_classes(p, pc.k, kp)]
    out = []
    for choice in itertools.product(gammas, repeat=pc.l):
        step = CoordinateMap(tuple(Block(1, 1, (PowerCoset(PAdic(p, u) * _pi(p, r), n, kt),))
                                   for r, u in choice))
        rows = tuple((r, tuple(n if j == i else 0 for j in range(pc.l)))
                     for i, (r, _) in enumerate(choice))
        q = Piece(pc.l, kt, (step,) + pc.steps, _compose_rows(pc.rows, rows, pc.l))
        fs = tuple(_reduced(f.e, *_pulled(q, f), p) for f in forms)
        out.append((q, fs))
    return out


def _reduced(e: int, C, mu, p: int) -> MonomialForm:
    if C == INF:
        return MonomialForm(1, PAdic(p, 0), mu)
    if C % e:
        raise FormError(f"form valuation (C={C})/{e} is not an integer on a part")
    return MonomialForm(1, _pi(p, C // e), tuple(m // e for m in mu))
