"""The script language: set and form bindings plus commands.

    prime 5;
    set X = cell(v(1) <= v(x) <= v(25), x in 1*P_2 level 1);
    set B = box(l=2, k=1) | point(1, 1/5);
    form b = (e=2, beta=25, mu=[3]);
    classify X;
    rectilinearize X with [b];
    dim B;
    verify X samples=1000 seed=42 modulus=2;

Set expressions combine ``cell``, ``box``, ``point``, ``space``, ``empty``,
``presented``, ``polytope`` and ``union`` with products ``*`` and tagged
unions ``|`` (``*`` binds tighter).  Only cell-shaped conditions can be
written; polynomial conditions are rejected at parse time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import ParseError, TokenStream
from .padic import Context, PAdic, format_padic
from .sets import (SQ_LE, SQ_LT, SQ_NONE, Bound, Cell1D, Empty, LevelBox, MonomialForm,
                   Point, PolySet, PresentedCell, Product, SetDescriptor, Space,
                   TaggedUnion, Union)

COMMANDS = ("classify", "rectilinearize", "dim", "verify")
VERIFY_OPTIONS = ("samples", "seed", "modulus")
CELL_HINT = ("only cell conditions can be written: "
             "cell(v(a1) <= v(x - c) <= v(a2), x - c in lam*P_n level k)")


class PolynomialError(ParseError):
    """A raw polynomial condition where only cell syntax is allowed."""


@dataclass(frozen=True)
class Command:
    kind: str
    target: str
    forms: tuple[str, ...] = ()
    options: tuple[tuple[str, int], ...] = ()

    def option(self, key: str, default: int | None = None) -> int | None:
        return dict(self.options).get(key, default)


@dataclass(frozen=True)
class Script:
    prime: int | None
    sets: tuple[tuple[str, SetDescriptor], ...] = ()
    forms: tuple[tuple[str, MonomialForm], ...] = ()
    commands: tuple[Command, ...] = field(default=())

    def set_named(self, name: str) -> SetDescriptor:
        return dict(self.sets)[name]

    def form_named(self, name: str) -> MonomialForm:
        return dict(self.forms)[name]


# -- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, prime: int | None = None):
        self.ts = TokenStream(text)
        self.p = prime
        self.prime_decl = None
        self.sets: dict[str, SetDescriptor] = {}
        self.forms: dict[str, MonomialForm] = {}
        self.commands: list[Command] = []

    def fail(self, msg, expected=(), tok=None):
        return self.ts.error(msg, expected, tok)

    def need_prime(self):
        if self.p is None:
            raise self.fail("the prime must be declared before the first literal", ("prime",))
        return self.p

    def lit(self) -> PAdic:
        return self.ts.literal(self.need_prime())

    def script(self) -> Script:
        ts = self.ts
        while ts.tok.kind != "EOF":
            self.statement()
        return Script(self.prime_decl, tuple(self.sets.items()), tuple(self.forms.items()),
                      tuple(self.commands))

    def statement(self):
        ts = self.ts
        head = ts.expect("prime", "set", "form", *COMMANDS)
        if head.text == "prime":
            tok = ts.tok
            q = ts.integer()
            try:
                Context(q)
            except ValueError as e:
                raise self.fail(str(e), tok=tok) from e
            if self.prime_decl is not None:
                raise self.fail("prime declared twice", tok=head)
            self.prime_decl = q
            if self.p is None:
                self.p = q
        elif head.text == "set":
            name = self.fresh_name()
            ts.expect("=")
            self.sets[name] = self.expr()
        elif head.text == "form":
            name = self.fresh_name()
            ts.expect("=")
            self.forms[name] = self.form()
        else:
            self.commands.append(self.command(head.text))
        ts.expect(";")

    def fresh_name(self) -> str:
        tok = self.ts.tok
        name = self.ts.name()
        if name in self.sets or name in self.forms:
            raise self.fail(f"name {name!r} already bound", tok=tok)
        if name in _KEYWORDS:
            raise self.fail(f"{name!r} is reserved", ("name",), tok)
        return name

    def bound_set(self) -> str:
        tok = self.ts.tok
        name = self.ts.name("set name")
        if name not in self.sets:
            raise self.fail(f"unbound set {name!r}", sorted(self.sets), tok)
        return name

    def command(self, kind: str) -> Command:
        ts = self.ts
        target = self.bound_set()
        forms, options = (), ()
        if kind == "rectilinearize" and ts.accept("with"):
            ts.expect("[")
            names = []
            while not ts.at("]"):
                tok = ts.tok
                n = ts.name("form name")
                if n not in self.forms:
                    raise self.fail(f"unbound form {n!r}", sorted(self.forms), tok)
                names.append(n)
                if not ts.accept(","):
                    break
            ts.expect("]")
            forms = tuple(names)
        if kind == "verify":
            opts = {}
            while ts.at(*VERIFY_OPTIONS):
                key = ts.next().text
                ts.expect("=")
                tok = ts.tok
                val = ts.integer()
                if val < 0 or (key == "modulus" and val < 1):
                    raise self.fail(f"{key} must be positive", tok=tok)
                opts[key] = val
            options = tuple(sorted(opts.items()))
        return Command(kind, target, forms, options)

    def form(self) -> MonomialForm:
        ts = self.ts
        start = ts.expect("(")
        ts.expect("e")
        ts.expect("=")
        e = ts.integer()
        ts.expect(",")
        ts.expect("beta")
        ts.expect("=")
        beta = self.lit()
        ts.expect(",")
        ts.expect("mu")
        ts.expect("=")
        mu = self.int_list()
        ts.expect(")")
        try:
            return MonomialForm(e, beta, mu)
        except ValueError as e:
            raise self.fail(str(e), tok=start) from e

    def int_list(self) -> tuple[int, ...]:
        ts = self.ts
        ts.expect("[")
        out = []
        while not ts.at("]"):
            out.append(ts.integer())
            if not ts.accept(","):
                break
        ts.expect("]")
        return tuple(out)

    # -- set expressions --

    def expr(self) -> SetDescriptor:
        items = [self.term()]
        while self.ts.accept("|"):
            items.append(self.term())
        if len(items) == 1:
            return items[0]
        return TaggedUnion(tuple(enumerate(items)))

    def term(self) -> SetDescriptor:
        left = self.atom()
        while self.ts.accept("*"):
            left = Product(left, self.atom())
        return left

    def atom(self) -> SetDescriptor:
        ts = self.ts
        tok = ts.tok
        if ts.accept("("):
            inner = self.expr()
            ts.expect(")")
            return inner
        if ts.at("{"):
            raise PolynomialError("set-builder conditions are not supported; " + CELL_HINT,
                                  tok.line, tok.col, _CONSTRUCTORS)
        if tok.kind != "NAME":
            raise self.fail(f"unexpected {tok.text or 'end of input'!r}",
                            _CONSTRUCTORS + ("set name", "("))
        if tok.text in _CONSTRUCTORS and ts.peek().text == "(":
            ts.next()
            ts.expect("(")
            out = getattr(self, "c_" + tok.text)(tok)
            ts.expect(")")
            return out
        if tok.text in ("poly", "zero", "f") or ts.peek().text == "(":
            raise PolynomialError(f"unknown constructor {tok.text!r}; " + CELL_HINT,
                                  tok.line, tok.col, _CONSTRUCTORS)
        name = self.bound_set()
        return self.sets[name]

    def _build(self, tok, cls, *args, **kw):
        try:
            return cls(*args, **kw)
        except ValueError as e:
            raise self.fail(str(e), tok=tok) from e

    def c_box(self, tok):
        ts = self.ts
        ts.expect("l")
        ts.expect("=")
        l = ts.integer()
        ts.expect(",")
        ts.expect("k")
        ts.expect("=")
        k = ts.integer()
        if l < 0 or k < 0:
            raise self.fail("box needs l >= 0 and k >= 0", tok=tok)
        return LevelBox(l, k)

    def c_point(self, tok):
        coords = []
        while not self.ts.at(")"):
            coords.append(self.lit())
            if not self.ts.accept(","):
                break
        return Point(tuple(coords))

    def c_space(self, tok):
        d = self.ts.integer()
        if d < 0:
            raise self.fail("dimension must be nonnegative", tok=tok)
        return Space(d)

    def c_empty(self, tok):
        return self._build(tok, Empty, self.ts.integer())

    def c_union(self, tok):
        items = [self.expr()]
        while self.ts.accept(","):
            items.append(self.expr())
        return Union(tuple(items))

    def c_polytope(self, tok):
        ts = self.ts
        l, k = self._lk()
        ts.expect(",")
        ts.expect("rows")
        ts.expect("=")
        ts.expect("[")
        rows = []
        while not ts.at("]"):
            rows.append(self.int_list())
            if not ts.accept(","):
                break
        ts.expect("]")
        return self._build(tok, PolySet, l, k, tuple(rows))

    def _lk(self):
        ts = self.ts
        ts.expect("l")
        ts.expect("=")
        l = ts.integer()
        ts.expect(",")
        ts.expect("k")
        ts.expect("=")
        return l, ts.integer()

    def c_presented(self, tok):
        ts = self.ts
        l, k = self._lk()
        kw = {}
        while ts.accept(","):
            key = ts.expect("upper", "lower", "last").text
            ts.expect("=")
            if key == "last":
                kw["last_in_R"] = ts.expect("R", "K").text == "R"
                continue
            btok = ts.expect("(")
            ts.expect("beta")
            ts.expect("=")
            beta = self.lit()
            ts.expect(",")
            ts.expect("nu")
            ts.expect("=")
            nu = self.int_list()
            strict = False
            if ts.accept(","):
                ts.expect("strict")
                strict = True
            ts.expect(")")
            kw[key] = self._build(btok, Bound, beta, nu, strict)
        return self._build(tok, PresentedCell, l, k, **kw)

    def c_cell(self, tok):
        """cell([bounds ,] x - c in lam*P_n [level k])"""
        ts = self.ts
        var, center = None, None
        a1 = a2 = None
        sq1 = sq2 = SQ_NONE
        if ts.at("v"):
            left = self.v_term()
            optok = ts.expect("<=", "<")
            op = optok.text
            if not ts.at("v"):
                raise self.fail(f"{op!r} is missing its right operand", ("v",), optok)
            right = self.v_term()
            if isinstance(left, tuple):          # v(x - c) <op> v(a2)
                (var, center), a2, sq2 = left, right, op
            elif isinstance(right, tuple):       # v(a1) <op> v(x - c) ...
                a1, sq1, (var, center) = left, op, right
                if ts.at("<=", "<"):
                    sq2 = ts.next().text
                    a2 = self.v_term()
                    if isinstance(a2, tuple):
                        raise self.fail("upper bound must be v(constant)")
            else:
                raise self.fail("one side must be v(x - c)", tok=tok)
            if isinstance(a1, tuple) or isinstance(a2, tuple):
                raise self.fail("bounds must be v(constant)", tok=tok)
            ts.expect(",")
        ctok = ts.tok
        var2, center2 = self.var_minus_center()
        if var is not None and (var2 != var or center2 != center):
            raise self.fail("the coset condition must use the same x - c as the bounds",
                            tok=ctok)
        ts.expect("in")
        lam = self.lit()
        ts.expect("*")
        ptok = ts.tok
        pn = ts.name("P_n")
        if not (pn.startswith("P_") and pn[2:].isdigit()):
            raise self.fail(f"expected P_n, got {pn!r}", ("P_n",), ptok)
        level = 0
        if ts.accept("level"):
            level = ts.integer()
        return self._build(tok, Cell1D, center2, lam, int(pn[2:]), a1, a2,
                           _sq(sq1), _sq(sq2), level)

    def v_term(self):
        """v(constant) -> PAdic, or v(x - c) -> (name, c)."""
        ts = self.ts
        ts.expect("v")
        ts.expect("(")
        if ts.tok.kind == "NAME":
            out = self.var_minus_center()
        else:
            out = self.lit()
            self.reject_arith()
        ts.expect(")")
        return out

    def var_minus_center(self):
        ts = self.ts
        name = ts.name("variable")
        self.reject_arith(allow_minus=True)
        if ts.accept("-"):
            c = self.lit()
        else:
            c = PAdic(self.need_prime(), 0)
        self.reject_arith()
        return name, c

    def reject_arith(self, allow_minus=False):
        ts = self.ts
        ops = ("^", "*", "+", "(", "/") + (() if allow_minus else ("-",))
        if ts.at(*ops) or ts.tok.kind in ("NAME", "INT") and not ts.at("in"):
            t = ts.tok
            raise PolynomialError("polynomial expressions are not supported; " + CELL_HINT,
                                  t.line, t.col, (")", ",", "in"))


def _sq(op: str) -> str:
    return {SQ_NONE: SQ_NONE, "<=": SQ_LE, "<": SQ_LT}[op]


_CONSTRUCTORS = ("box", "cell", "empty", "point", "polytope", "presented", "space", "union")
_KEYWORDS = frozenset(("prime", "set", "form", "with", "in", "level") + COMMANDS
                      + _CONSTRUCTORS)


def parse_dsl(text: str, prime: int | None = None) -> Script:
    """Parse a script; ``prime`` overrides (or supplies) the declared prime."""
    return _Parser(text, prime).script()


# -- printer ----------------------------------------------------------------

def format_descriptor(S: SetDescriptor) -> str:
    return _fmt(S, 0)


def _fmt(S, ctx: int) -> str:
    """ctx 0: top, 1: operand of |, 2: operand of *."""
    if isinstance(S, TaggedUnion):
        if [t for t, _ in S.items] != list(range(len(S.items))) or len(S.items) < 2:
            raise ValueError("only tagged unions with tags 0..n-1 (n >= 2) are printable")
        s = " | ".join(_fmt(T, 1) for _, T in S.items)
        return s if ctx == 0 else f"({s})"
    if isinstance(S, Product):
        s = f"{_fmt(S.left, 1 if isinstance(S.left, Product) else 2)} * {_fmt(S.right, 2)}"
        return f"({s})" if ctx == 2 else s
    if isinstance(S, LevelBox):
        return f"box(l={S.l}, k={S.k})"
    if isinstance(S, Point):
        return "point(" + ", ".join(map(format_padic, S.coords)) + ")"
    if isinstance(S, Space):
        return f"space({S.d})"
    if isinstance(S, Empty):
        return f"empty({S.arity})"
    if isinstance(S, Union):
        return "union(" + ", ".join(_fmt(T, 0) for T in S.items) + ")"
    if isinstance(S, PolySet):
        rows = ", ".join("[" + ", ".join(map(str, r)) + "]" for r in S.ineqs)
        return f"polytope(l={S.l}, k={S.k}, rows=[{rows}])"
    if isinstance(S, PresentedCell):
        s = f"presented(l={S.l}, k={S.k}"
        for key in ("upper", "lower"):
            b = getattr(S, key)
            if b is not None:
                nu = ", ".join(map(str, b.nu))
                s += f", {key}=(beta={format_padic(b.beta)}, nu=[{nu}]"
                s += ", strict)" if b.strict else ")"
        if not S.last_in_R:
            s += ", last=K"
        return s + ")"
    if isinstance(S, Cell1D):
        xc = "x" if S.c.is_zero else f"x - {format_padic(S.c)}"
        parts = []
        if S.a1 is not None or S.a2 is not None:
            b = f"v({xc})"
            if S.a1 is not None:
                b = f"v({format_padic(S.a1)}) {S.sq1} " + b
            if S.a2 is not None:
                b += f" {S.sq2} v({format_padic(S.a2)})"
            parts.append(b)
        coset = f"{xc} in {format_padic(S.lam)}*P_{S.n}"
        if S.level:
            coset += f" level {S.level}"
        parts.append(coset)
        return "cell(" + ", ".join(parts) + ")"
    raise ValueError(f"{type(S).__name__} has no script syntax")


def format_form(f: MonomialForm) -> str:
    return f"(e={f.e}, beta={format_padic(f.beta)}, mu=[{', '.join(map(str, f.mu))}])"


def format_script(s: Script) -> str:
    lines = []
    if s.prime is not None:
        lines.append(f"prime {s.prime};")
    lines += [f"set {n} = {format_descriptor(S)};" for n, S in s.sets]
    lines += [f"form {n} = {format_form(f)};" for n, f in s.forms]
    for c in s.commands:
        line = f"{c.kind} {c.target}"
        if c.forms:
            line += " with [" + ", ".join(c.forms) + "]"
        for k, v in c.options:
            line += f" {k}={v}"
        lines.append(line + ";")
    return "\n".join(lines) + "\n"
