"""Exact integer polynomials and the text format used on the command line."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .errors import DomainError, IntegrityError


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    cs = [int(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial with ascending coefficients; the zero polynomial has ``coeffs == ()``."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    # construction ---------------------------------------------------------

    @classmethod
    def x(cls) -> IntPoly:
        return cls((0, 1))

    @classmethod
    def const(cls, c: int) -> IntPoly:
        return cls((c,))

    @classmethod
    def parse(cls, text: str) -> IntPoly:
        return parse_poly(text)

    # basic properties -----------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, x):
        r = 0
        for c in reversed(self.coeffs):
            r = r * x + c
        return r

    def eval_mod(self, x: int, n: int) -> int:
        r = 0
        for c in reversed(self.coeffs):
            r = (r * x + c) % n
        return r

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def derivative(self) -> IntPoly:
        return IntPoly(i * c for i, c in enumerate(self.coeffs) if i)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other) -> IntPoly:
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> IntPoly:
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> IntPoly:
        return self + (-_coerce(other))

    def __rsub__(self, other) -> IntPoly:
        return _coerce(other) - self

    def __mul__(self, other) -> IntPoly:
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> IntPoly:
        if e < 0:
            raise DomainError("negative exponent")
        r, b = IntPoly((1,)), self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def exact_div(self, n: int) -> IntPoly:
        """Divide every coefficient by the integer ``n``; raise if any division is inexact."""
        if n == 0:
            raise DomainError("division by zero")
        bad = [c for c in self.coeffs if c % n]
        if bad:
            raise IntegrityError(f"coefficients not divisible by {n}")
        return IntPoly(c // n for c in self.coeffs)

    def compose(self, other: IntPoly) -> IntPoly:
        r = IntPoly()
        for c in reversed(self.coeffs):
            r = r * other + c
        return r

    def taylor_shift(self, b: int, m: int = 1) -> IntPoly:
        return taylor_shift(self, b, m)

    # display --------------------------------------------------------------

    def to_text(self) -> str:
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' + mono if mono else ''}"
            terms.append(("-" if c < 0 else "+") + body)
        s = "".join(terms)
        return s[1:] if s.startswith("+") else s


def _coerce(v) -> IntPoly:
    if isinstance(v, IntPoly):
        return v
    if isinstance(v, int):
        return IntPoly((v,))
    raise TypeError(f"cannot combine IntPoly with {type(v).__name__}")


def taylor_shift(h: IntPoly, b: int, m: int = 1) -> IntPoly:
    """Coefficients of x -> h(b + m*x), computed exactly by Horner composition."""
    lin = IntPoly((b, m))
    r = IntPoly()
    for c in reversed(h.coeffs):
        r = r * lin + c
    return r


def content_nonconstant(g: IntPoly) -> int:
    """gcd of the coefficients of x, x^2, ..., x^deg."""
    if g.degree < 1:
        raise DomainError("content_nonconstant needs a non-constant polynomial")
    return reduce(math.gcd, g.coeffs[1:], 0)


# --------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"\s*(?:(\d+)|(x)|(.))")


def parse_poly(text: str) -> IntPoly:
    """Parse ``"-13,0,1"`` (ascending coefficients) or an expression in ``x``.

    Expressions accept integers, ``x``, ``+ - *``, ``^`` (or ``**``) with
    non-negative integer exponents, parentheses and implicit multiplication,
    e.g. ``"(x^2-13)(x^2-17)(x^2-221)"``.
    """
    s = text.strip()
    if not s:
        raise DomainError("empty polynomial")
    if re.fullmatch(r"[-+]?\d+(\s*,\s*[-+]?\d+)*", s) and "," in s:
        return IntPoly(int(t) for t in s.split(","))
    return _Parser(s.replace("**", "^")).parse()


class _Parser:
    def __init__(self, text: str):
        self.toks: list[tuple[str, str]] = []
        for num, var, op in _TOKEN.findall(text):
            if num:
                self.toks.append(("num", num))
            elif var:
                self.toks.append(("x", var))
            elif op.strip():
                if op not in "+-*^()":
                    raise DomainError(f"unexpected character {op!r} in polynomial")
                self.toks.append(("op", op))
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise DomainError("unexpected end of polynomial")
        self.i += 1
        return tok

    def parse(self) -> IntPoly:
        p = self.expr()
        if self.peek() is not None:
            raise DomainError(f"trailing input near token {self.peek()[1]!r}")
        return p

    def expr(self) -> IntPoly:
        sign = 1
        while self.peek() in (("op", "+"), ("op", "-")):
            if self.take()[1] == "-":
                sign = -sign
        p = self.term() * sign
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            p = p + t if op == "+" else p - t
        return p

    def term(self) -> IntPoly:
        p = self.factor()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                p = p * self.factor()
            elif tok is not None and (tok[0] in ("num", "x") or tok == ("op", "(")):
                p = p * self.factor()
            else:
                return p

    def factor(self) -> IntPoly:
        tok = self.take()
        if tok[0] == "num":
            base = IntPoly((int(tok[1]),))
        elif tok[0] == "x":
            base = IntPoly.x()
        elif tok == ("op", "("):
            base = self.expr()
            if self.take() != ("op", ")"):
                raise DomainError("unbalanced parentheses")
        elif tok == ("op", "-"):
            return -self.factor()
        else:
            raise DomainError(f"unexpected token {tok[1]!r}")
        if self.peek() == ("op", "^"):
            self.take()
            e = self.take()
            if e[0] != "num":
                raise DomainError("exponent must be a non-negative integer")
            base = base ** int(e[1])
        return base


def poly_from_any(v: IntPoly | str | Sequence[int]) -> IntPoly:
    if isinstance(v, IntPoly):
        return v
    if isinstance(v, str):
        return parse_poly(v)
    return IntPoly(v)


def rational_roots_exist(h: IntPoly, candidates: Iterable[int]) -> list[int]:
    return [r for r in candidates if h(r) == 0]


def to_fraction_coeffs(h: IntPoly) -> list[Fraction]:
    return [Fraction(c) for c in h.coeffs]
