"""Line-oriented text format for pipelines.

    pipeline
    prime 5
    source Space(d=1)
    target Space(d=1)
    step Scale(a=1/5)
    step TagMap(branches=((0, (HotelShift(),)),))
    end

Every step and descriptor is written as ``Name(field=value, ...)`` with
fields at their default value left out.  Exact parameters are PAdic
literals; which fields are PAdic and which are integers follows the field
annotations, so the format carries no type tags.
"""

from __future__ import annotations

import dataclasses
import sys
import types
import typing

from . import atlas, sets
from .lexer import TokenStream
from .padic import INF, Context, PAdic, format_padic


class IntOrInf:
    """Annotation for table entries that may be +inf."""


_HINT_TYPE = typing.Optional[tuple[tuple[PAdic, ...],
                                   tuple[tuple[IntOrInf, tuple[int, ...]], ...]]]


def _registry() -> dict[str, type]:
    out = {}
    for mod in (atlas, sets):
        for name, obj in vars(mod).items():
            if (isinstance(obj, type) and dataclasses.is_dataclass(obj)
                    and obj.__module__ == mod.__name__):
                out[name] = obj
    return out


REGISTRY = _registry()
_HINTS: dict[type, dict] = {}


def _field_types(cls: type) -> dict:
    if cls not in _HINTS:
        hints = typing.get_type_hints(cls, vars(sys.modules[cls.__module__]))
        if cls is sets.PipelineImage:
            hints["hint"] = _HINT_TYPE
        _HINTS[cls] = hints
    return _HINTS[cls]


# -- printing ---------------------------------------------------------------

def format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, PAdic):
        return format_padic(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if v == INF:
            return "inf"
        raise ValueError(f"cannot serialize float {v!r}")
    if isinstance(v, str):
        return '"' + v + '"'
    if isinstance(v, tuple):
        inner = ", ".join(format_value(x) for x in v)
        return f"({inner},)" if len(v) == 1 else f"({inner})"
    if dataclasses.is_dataclass(v):
        parts = []
        for f in dataclasses.fields(v):
            x = getattr(v, f.name)
            d = f.default
            if (x is None and d is None) or (type(x) is type(d) and x == d):
                continue
            parts.append(f"{f.name}={format_value(x)}")
        return f"{type(v).__name__}({', '.join(parts)})"
    raise ValueError(f"cannot serialize {type(v).__name__}")


def format_pipeline(P: atlas.IsoPipeline, p: int) -> str:
    lines = ["pipeline", f"prime {p}",
             f"source {format_value(P.source)}", f"target {format_value(P.target)}"]
    lines += [f"step {format_value(st)}" for st in P.steps]
    lines.append("end")
    return "\n".join(lines) + "\n"


# -- parsing ----------------------------------------------------------------

def _origin(t):
    return typing.get_origin(t)


def parse_value(ts: TokenStream, hint, p: int):
    """Read one value of the annotated type."""
    if hint is typing.Any or hint is sets.SetDescriptor or hint is atlas.IsoStep:
        return _parse_call(ts, p)
    origin = _origin(hint)
    if origin in (typing.Union, types.UnionType):
        args = typing.get_args(hint)
        if type(None) in args and ts.at("none"):
            ts.next()
            return None
        rest = [a for a in args if a is not type(None)]
        return parse_value(ts, rest[0], p)
    if origin is tuple:
        args = typing.get_args(hint)
        ts.expect("(")
        out = []
        i = 0
        while not ts.at(")"):
            if args and args[-1] is Ellipsis:
                sub = args[0]
            elif i < len(args):
                sub = args[i]
            else:
                raise ts.error("too many tuple entries", (")",))
            out.append(parse_value(ts, sub, p))
            i += 1
            if not ts.accept(","):
                break
        ts.expect(")")
        return tuple(out)
    if hint is PAdic:
        return ts.literal(p)
    if hint is bool:
        tok = ts.expect("true", "false")
        return tok.text == "true"
    if hint is int:
        return ts.integer()
    if hint is IntOrInf:
        if ts.accept("inf"):
            return INF
        return ts.integer()
    if hint is str:
        if ts.tok.kind != "STRING":
            raise ts.error(f"unexpected {ts.tok.text!r}", ("string",))
        return ts.next().text[1:-1]
    if isinstance(hint, type) and dataclasses.is_dataclass(hint):
        return _parse_call(ts, p, hint)
    raise ts.error(f"no reader for {hint!r}")


def _parse_call(ts: TokenStream, p: int, want: type | None = None):
    tok = ts.tok
    name = ts.name("step or descriptor name")
    cls = REGISTRY.get(name)
    if cls is None:
        raise ts.error(f"unknown name {name!r}", sorted(REGISTRY), tok)
    if want is not None and cls is not want:
        raise ts.error(f"expected {want.__name__}, got {name}", (want.__name__,), tok)
    ftypes = _field_types(cls)
    ts.expect("(")
    kwargs = {}
    while not ts.at(")"):
        ftok = ts.tok
        fname = ts.name("field name")
        if fname not in ftypes:
            raise ts.error(f"{name} has no field {fname!r}", sorted(ftypes), ftok)
        ts.expect("=")
        kwargs[fname] = parse_value(ts, ftypes[fname], p)
        if not ts.accept(","):
            break
    ts.expect(")")
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ts.error(f"invalid {name}: {e}", tok=tok) from e


def parse_pipeline(text: str) -> tuple[atlas.IsoPipeline, int]:
    """Inverse of format_pipeline; returns (pipeline, prime)."""
    ts = TokenStream(text)
    ts.expect("pipeline")
    ts.expect("prime")
    tok = ts.tok
    p = ts.integer()
    try:
        Context(p)
    except ValueError as e:
        raise ts.error(str(e), tok=tok) from e
    ts.expect("source")
    source = None if ts.accept("none") else _parse_call(ts, p)
    ts.expect("target")
    target = None if ts.accept("none") else _parse_call(ts, p)
    steps = []
    while ts.accept("step"):
        steps.append(_parse_call(ts, p))
    ts.expect("step", "end")
    if ts.tok.kind != "EOF":
        raise ts.error(f"unexpected {ts.tok.text!r} after end", ("end of input",))
    return atlas.IsoPipeline(source, target, tuple(steps)), p


# -- points -----------------------------------------------------------------

def format_point(x) -> str:
    def one(c):
        if isinstance(c, sets.Tagged):
            return f"{c.tag}:{format_point(c.point)}"
        return format_padic(c)
    return "(" + ", ".join(one(c) for c in x) + ")"


def parse_point(text: str, p: int) -> tuple:
    """``(1, 1/5)``, a bare ``1, 1/5``, ``()`` or tagged entries ``0:(1, 2)``."""
    ts = TokenStream(text)
    if ts.at("("):
        x = _point_body(ts, p)
    else:
        x = _coords(ts, p, closing=None)
    if ts.tok.kind != "EOF":
        raise ts.error(f"unexpected {ts.tok.text!r}", ("end of input",))
    return x


def _point_body(ts, p):
    ts.expect("(")
    x = _coords(ts, p, closing=")")
    ts.expect(")")
    return x


def _coords(ts, p, closing):
    out = []
    while ts.tok.kind != "EOF" and not (closing and ts.at(closing)):
        if ts.tok.kind == "INT" and ts.peek().text == ":":
            tag = int(ts.next().text)
            ts.expect(":")
            out.append(sets.Tagged(tag, _point_body(ts, p)))
        else:
            out.append(ts.literal(p))
        if not ts.accept(","):
            break
    return tuple(out)
