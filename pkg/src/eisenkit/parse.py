"""Polynomial text syntax.

Grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/')? unary)*      # '*' optional before a variable or '('
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := INT | INT '/' INT | VAR | '(' expr ')'

Division is only allowed by a nonzero rational constant.  The printer emits
monomials in graded-lex order (total degree, then w-degree, descending).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .poly import BiPoly, UniPoly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


@dataclass
class _Tok:
    kind: str  # 'int', 'var', 'op', 'end'
    text: str
    pos: int


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _tokenize(text: str, variables: tuple[str, ...] = ()) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", *_linecol(text, pos))
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(_Tok("int", m.group(1), start))
        elif m.group(2):
            name = m.group(2)
            if name not in variables and all(ch in variables for ch in name):
                # juxtaposed single-letter variables, e.g. "zw"
                toks.extend(_Tok("var", ch, start + k) for k, ch in enumerate(name))
            else:
                toks.append(_Tok("var", name, start))
        else:
            op = m.group(3)
            toks.append(_Tok("op", "^" if op == "**" else op, start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.toks = _tokenize(text, variables)
        self.i = 0
        self.variables = variables

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, *_linecol(self.text, tok.pos))

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        tok = self.take()
        if tok.text != text or tok.kind != "op":
            self.error(f"expected {text!r}", tok)

    # polynomials are dicts {exponent tuple: Fraction} during parsing
    def parse(self) -> dict:
        if self.peek().kind == "end":
            self.error("empty polynomial")
        poly = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return poly

    def expr(self) -> dict:
        acc = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            rhs = self.term()
            acc = _add(acc, rhs if op == "+" else _scale(rhs, -1))
        return acc

    def term(self) -> dict:
        acc = self.unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.take()
                acc = _mul(acc, self.unary())
            elif tok.kind == "op" and tok.text == "/":
                self.take()
                rhs = self.unary()
                c = _as_constant(rhs)
                if c is None:
                    self.error("division by a non-constant", tok)
                if c == 0:
                    self.error("division by zero", tok)
                acc = _scale(acc, 1 / c)
            elif tok.kind == "var" or (tok.kind == "op" and tok.text == "("):
                acc = _mul(acc, self.unary())
            else:
                return acc

    def unary(self) -> dict:
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.take()
            inner = self.unary()
            return inner if tok.text == "+" else _scale(inner, -1)
        return self.power()

    def power(self) -> dict:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            tok = self.take()
            if tok.kind != "int":
                self.error("exponent must be a non-negative integer literal", tok)
            result = {self._zero_exp(): Fraction(1)}
            for _ in range(int(tok.text)):
                result = _mul(result, base)
            return result
        return base

    def atom(self) -> dict:
        tok = self.take()
        if tok.kind == "int":
            return {self._zero_exp(): Fraction(int(tok.text))}
        if tok.kind == "var":
            if tok.text not in self.variables:
                self.error(
                    f"unknown variable {tok.text!r} (allowed: {', '.join(self.variables)})", tok
                )
            exp = [0] * len(self.variables)
            exp[self.variables.index(tok.text)] = 1
            return {tuple(exp): Fraction(1)}
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected {tok.text!r}", tok)

    def _zero_exp(self):
        return (0,) * len(self.variables)


def _add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + c
    return {k: c for k, c in out.items() if c != 0}


def _scale(a: dict, c) -> dict:
    return {k: v * c for k, v in a.items() if v * c != 0}


def _mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c != 0}


def _as_constant(a: dict):
    if not a:
        return Fraction(0)
    if set(a) == {tuple(0 for _ in next(iter(a)))}:
        return next(iter(a.values()))
    return None


def parse_bipoly(text: str) -> BiPoly:
    """Parse a polynomial in z and w with rational coefficients."""
    raw = _Parser(text, ("z", "w")).parse()
    return BiPoly({(e[0], e[1]): c for e, c in raw.items()})


def parse_unipoly(text: str, var: str = "x") -> UniPoly:
    raw = _Parser(text, (var,)).parse()
    if not raw:
        return UniPoly()
    deg = max(e[0] for e in raw)
    cs = [Fraction(0)] * (deg + 1)
    for (k,), c in raw.items():
        cs[k] = c
    return UniPoly(cs)


# ---------------------------------------------------------------------------
# printing

def _fmt_coeff(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


def _fmt_term(c, powers: list[tuple[str, int]], first: bool) -> str:
    c = Fraction(c)
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    factors = [v if e == 1 else f"{v}^{e}" for v, e in powers if e > 0]
    if not factors:
        body = _fmt_coeff(mag)
    elif mag == 1:
        body = "*".join(factors)
    else:
        body = "*".join([_fmt_coeff(mag)] + factors)
    if first:
        return body if sign == "+" else f"-{body}"
    return f" {sign} {body}"


def format_bipoly(P: BiPoly) -> str:
    if P.is_zero():
        return "0"
    out = []
    for idx, (i, j) in enumerate(P.monomials()):
        out.append(_fmt_term(P.terms[(i, j)], [("z", i), ("w", j)], idx == 0))
    return "".join(out)


def format_unipoly(p: UniPoly, var: str = "x") -> str:
    if p.is_zero():
        return "0"
    try:
        cs = [Fraction(c) for c in p.coeffs]
    except TypeError:
        return " + ".join(f"({c})*{var}^{k}" for k, c in enumerate(p.coeffs) if c != 0)
    out = []
    for k in range(len(cs) - 1, -1, -1):
        if cs[k] != 0:
            out.append(_fmt_term(cs[k], [(var, k)], not out))
    return "".join(out)
