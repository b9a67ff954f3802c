"""Tokens, positions and parse errors shared by the script and pipeline formats."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .padic import PAdic


class ParseError(ValueError):
    """A syntax error at (line, col), with the set of tokens that would fit."""

    def __init__(self, msg: str, line: int, col: int, expected=()):
        self.msg, self.line, self.col = msg, line, col
        self.expected = tuple(sorted(set(expected)))
        text = f"{line}:{col}: {msg}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)


@dataclass(frozen=True)
class Token:
    kind: str      # NAME, INT, STRING, OP, EOF
    text: str
    line: int
    col: int


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<NAME>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<INT>[0-9]+)
  | (?P<STRING>"[^"\n]*")
  | (?P<OP><=|>=|==|[-+*/^<>=(),;\[\]@|{}:!])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    out, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("EOF", "", line, pos - start + 1))
    return out


class TokenStream:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, ahead: int = 1) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("OP", "NAME") and t.text in texts

    def error(self, msg: str, expected=(), tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        return ParseError(msg, t.line, t.col, expected)

    def next(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.i += 1
        return t

    def expect(self, *texts: str) -> Token:
        if not self.at(*texts):
            shown = self.tok.text or "end of input"
            raise self.error(f"unexpected {shown!r}", texts)
        return self.next()

    def accept(self, *texts: str) -> Token | None:
        return self.next() if self.at(*texts) else None

    def name(self, what: str = "name") -> str:
        if self.tok.kind != "NAME":
            raise self.error(f"unexpected {self.tok.text or 'end of input'!r}", (what,))
        return self.next().text

    def integer(self) -> int:
        neg = self.accept("-") is not None
        if self.tok.kind != "INT":
            raise self.error(f"unexpected {self.tok.text or 'end of input'!r}", ("integer",))
        n = int(self.next().text)
        return -n if neg else n

    def literal(self, p: int) -> PAdic:
        """An integer, a rational a/b, or a truncated literal [d0,d1,...]@s."""
        if self.at("["):
            self.next()
            digits = [self.integer()]
            while self.accept(","):
                digits.append(self.integer())
            self.expect("]")
            self.expect("@")
            tok = self.tok
            s = self.integer()
            try:
                return PAdic.from_digits(p, digits, s)
            except ValueError as e:
                raise self.error(str(e), tok=tok) from e
        tok = self.tok
        if not (tok.kind == "INT" or (tok.text == "-" and self.peek().kind == "INT")):
            raise self.error(f"unexpected {tok.text or 'end of input'!r}",
                             ("integer", "a/b", "[digits]@s"))
        q = Fraction(self.integer())
        if self.accept("/"):
            d = self.integer()
            if d == 0:
                raise self.error("zero denominator", tok=tok)
            q /= d
        return PAdic(p, q)
