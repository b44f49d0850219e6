"""Exact multivariate polynomials over the rationals.

A :class:`Poly` is a sparse map from exponent tuples to :class:`fractions.Fraction`
coefficients.  The number of variables is fixed per instance; the variables are
printed as ``x1 .. xn`` unless other names are supplied.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

Scalar = Fraction
Exps = Tuple[int, ...]


def as_scalar(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    return Fraction(c)


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Exps, Fraction] | None = None):
        self.nvars = nvars
        self.terms: Dict[Exps, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if c:
                    assert len(e) == nvars, (e, nvars)
                    self.terms[tuple(e)] = as_scalar(c)

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: as_scalar(c)})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        """The variable with 0-based index ``i``."""
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    # predicates ---------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        p = Poly(self.nvars)
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        p = Poly(self.nvars)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = as_scalar(other)
            p = Poly(self.nvars)
            if c:
                p.terms = {e: v * c for e, v in self.terms.items()}
            return p
        other = self._coerce(other)
        out: Dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        p = Poly(self.nvars)
        p.terms = {e: c for e, c in out.items() if c}
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative exponent")
        result = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def diff(self, i: int) -> "Poly":
        """Partial derivative with respect to the variable with 0-based index ``i``."""
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                out[tuple(e2)] = c * k
        return Poly(self.nvars, out)

    def subs_zero(self, i: int) -> "Poly":
        return Poly(self.nvars, {e: c for e, c in self.terms.items() if e[i] == 0})

    # printing -----------------------------------------------------------
    def sorted_terms(self):
        # graded lex: high degree first, then lexicographic on exponents
        return sorted(self.terms.items(), key=lambda ec: (-sum(ec[0]), tuple(-k for k in ec[0])))

    def to_str(self, names: Sequence[str] | None = None) -> str:
        return format_poly(self, names)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Poly({self.to_str()!r})"


def default_names(nvars: int) -> list[str]:
    return [f"x{i + 1}" for i in range(nvars)]


def _format_monomial(e: Exps, names: Sequence[str]) -> str:
    parts = []
    for k, name in zip(e, names):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(p: Poly, names: Sequence[str] | None = None) -> str:
    """Canonical printer; the output parses back with :func:`parse_poly`."""
    names = list(names) if names is not None else default_names(p.nvars)
    if not p.terms:
        return "0"
    out = []
    for i, (e, c) in enumerate(p.sorted_terms()):
        mono = _format_monomial(e, names)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        if i == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# parsing ----------------------------------------------------------------

class PolySyntaxError(ValueError):
    """Malformed polynomial text; ``pos`` is the 0-based column of the problem."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at column {pos + 1}" + (f" in {text!r}" if text else ""))


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(s: str):
    pos = 0
    toks = []
    while pos < len(s):
        m = _TOKEN_RE.match(s, pos)
        if m is None:
            break
        if m.end() == pos:
            break
        num, name, op = m.groups()
        start = m.start(m.lastindex) if m.lastindex else pos
        if num is not None:
            toks.append(("num", int(num), start))
        elif name is not None:
            toks.append(("name", name, start))
        elif op is not None:
            if op.isspace():
                pos = m.end()
                continue
            if op not in "+-*^/()":
                raise PolySyntaxError(f"unexpected character {op!r}", start, s)
            toks.append(("op", op, start))
        pos = m.end()
    toks.append(("end", None, len(s)))
    return toks


class _Parser:
    # expr   := ['+'|'-'] term (('+'|'-') term)*
    # term   := factor ('*' factor)*
    # factor := atom ('^' INT)?
    # atom   := INT ['/' INT] | NAME | '(' expr ')'

    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = {n: i for i, n in enumerate(names)}
        self.nvars = len(names)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolySyntaxError(msg, tok[2], self.text)

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            tok = self.peek()
            if tok[0] in ("name", "num") or tok[1] == "(":
                self.error("implicit multiplication is not allowed")
            self.error(f"unexpected token {tok[1]!r}")
        return p

    def expr(self) -> Poly:
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        p = self.term() * sign
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                t = self.term()
                p = p + t if tok[1] == "+" else p - t
            else:
                return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                p = p * self.factor()
            else:
                return p

    def factor(self) -> Poly:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            neg = False
            t = self.peek()
            if t[0] == "op" and t[1] == "-":
                self.take()
                neg = True
                t = self.peek()
            if t[0] != "num":
                self.error("exponent must be a non-negative integer", t)
            if neg:
                self.error("negative exponent", t)
            self.take()
            return base ** t[1]
        return base

    def atom(self) -> Poly:
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "/":
                self.take()
                den = self.peek()
                if den[0] != "num":
                    self.error("expected integer denominator", den)
                self.take()
                if den[1] == 0:
                    self.error("zero denominator", den)
                return Poly.const(self.nvars, Fraction(val, den[1]))
            return Poly.const(self.nvars, val)
        if kind == "name":
            if val not in self.names:
                raise PolySyntaxError(f"undefined variable {val!r}", pos, self.text)
            return Poly.var(self.nvars, self.names[val])
        if kind == "op" and val == "(":
            p = self.expr()
            close = self.take()
            if close[0] != "op" or close[1] != ")":
                self.error("expected ')'", close)
            return p
        if kind == "end":
            self.error("unexpected end of expression", tok)
        self.error(f"unexpected token {val!r}", tok)


def parse_poly(text: str, nvars: int | None = None, names: Sequence[str] | None = None) -> Poly:
    """Parse ``text`` into a :class:`Poly` in variables ``x1..x<nvars>``.

    Grammar: rational literals ``p`` or ``p/q``, variables, ``+ - * ^`` and
    parentheses.  Exponents are non-negative integers; implicit multiplication
    is rejected.
    """
    if names is None:
        if nvars is None:
            raise ValueError("either nvars or names is required")
        names = default_names(nvars)
    return _Parser(text, names).parse()


def poly_sum(polys: Iterable[Poly], nvars: int) -> Poly:
    total = Poly(nvars)
    for p in polys:
        total = total + p
    return total
