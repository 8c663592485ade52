"""Exact polynomial arithmetic for univariate P(t) and trivariate MH(t, u, v).

Coefficients are :class:`fractions.Fraction`.  Public inputs are expected to
have nonnegative coefficients; differences formed internally (dominance
certificates, ``Q**n - n*P``) may carry negative ones, so the classes do not
reject them.  Use :meth:`UniPoly.is_nonnegative` where the sign matters.

Text grammar (input)::

    1 + t^2 u v + t^4 (u v)^2      ->  1 + t^2*u*v + t^4*u^2*v^2
    3/2*t^5 + 2t                   ->  2*t + 3/2*t^5
    t^2 - 1                        ->  -1 + t^2

JSON form: ``[{"coeff": "p/q", "exps": [a, b, c]}, ...]`` (univariate uses
``[a]``).
"""

from __future__ import annotations

import enum
import math
import numbers
import re
from decimal import Decimal
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import ParseError, UsageError

Rational = Union[int, Fraction]


class EvalMode(enum.Enum):
    APPROX = "approx"
    EXACT = "exact"


def as_fraction(x) -> Fraction:
    """Convert an exactly representable number to a Fraction.

    Floats are accepted because every finite float is a dyadic rational.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise UsageError("booleans are not evaluation points")
    if isinstance(x, (int, numbers.Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise UsageError(f"non-finite value {x!r} has no rational form")
        return Fraction(x)
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise UsageError(f"non-finite value {x!r} has no rational form")
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise UsageError(f"cannot read {x!r} as a rational number") from exc
    raise UsageError(f"exact mode needs a rational point, got {type(x).__name__}")


# ---------------------------------------------------------------- univariate


class UniPoly:
    """Univariate polynomial ``sum coeffs[k] * t**k`` in canonical form."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @classmethod
    def monomial(cls, k: int, c: Rational = 1) -> "UniPoly":
        return cls([0] * k + [c])

    @classmethod
    def from_terms(cls, terms: Mapping[int, Rational]) -> "UniPoly":
        if not terms:
            return cls()
        cs = [Fraction(0)] * (max(terms) + 1)
        for k, c in terms.items():
            if k < 0:
                raise ValueError("negative exponent")
            cs[k] += Fraction(c)
        return cls(cs)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def terms(self) -> dict[int, Fraction]:
        return {k: c for k, c in enumerate(self.coeffs) if c != 0}

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: "UniPoly") -> "UniPoly":
        other = _as_uni(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self.coeff(k) + other.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-_as_uni(other))

    def __rsub__(self, other) -> "UniPoly":
        return _as_uni(other) - self

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        other = _as_uni(other)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UniPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result, base = UniPoly([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(("UniPoly", self.coeffs))

    def __repr__(self) -> str:
        return f"UniPoly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    # calculus / evaluation -------------------------------------------------

    def derivative(self) -> "UniPoly":
        return UniPoly(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def __call__(self, t):
        return uni_eval(self, t, EvalMode.EXACT if isinstance(t, (int, Fraction)) else EvalMode.APPROX)

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)


def _as_uni(x) -> UniPoly:
    if isinstance(x, UniPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return UniPoly([x])
    raise TypeError(f"cannot combine UniPoly with {type(x).__name__}")


def uni_eval(p: UniPoly, t, mode: EvalMode = EvalMode.APPROX):
    """Evaluate ``p`` at ``t`` by Horner's scheme.

    ``EXACT`` returns a Fraction and rejects points without an exact rational
    form; ``APPROX`` works in binary double precision.
    """
    if mode is EvalMode.EXACT:
        x = as_fraction(t)
        acc = Fraction(0)
        for c in reversed(p.coeffs):
            acc = acc * x + c
        return acc
    x = float(t)
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * x + float(c)
    return acc


def uni_derivative(p: UniPoly) -> UniPoly:
    return p.derivative()


def uni_add(a: UniPoly, b: UniPoly) -> UniPoly:
    return a + b


def uni_mul(a: UniPoly, b: UniPoly) -> UniPoly:
    return a * b


def uni_pow(a: UniPoly, n: int) -> UniPoly:
    return a ** n


# --------------------------------------------------------------- trivariate

Exps = tuple[int, int, int]


class TriPoly:
    """Sparse polynomial in (t, u, v): ``{(a, b, c): coeff}``, zeros dropped."""

    __slots__ = ("_terms", "_key")

    def __init__(self, terms: Mapping[Exps, Rational] | None = None):
        clean: dict[Exps, Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != 3 or min(exps) < 0:
                raise ValueError(f"bad exponent triple {exps}")
            c = Fraction(c)
            if c != 0:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if clean[exps] == 0:
                    del clean[exps]
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_key", tuple(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("TriPoly is immutable")

    @classmethod
    def constant(cls, c: Rational) -> "TriPoly":
        return cls({(0, 0, 0): c})

    @classmethod
    def monomial(cls, a: int, b: int = 0, c: int = 0, coeff: Rational = 1) -> "TriPoly":
        return cls({(a, b, c): coeff})

    @classmethod
    def from_uni(cls, p: UniPoly) -> "TriPoly":
        return cls({(k, 0, 0): c for k, c in p.terms().items()})

    @property
    def terms(self) -> dict[Exps, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._key

    def is_zero(self) -> bool:
        return not self._terms

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self._terms.values())

    def uses_only_t(self) -> bool:
        return all(b == 0 and c == 0 for (_, b, c) in self._terms)

    def to_uni(self) -> UniPoly:
        if not self.uses_only_t():
            raise ValueError("polynomial depends on u or v")
        return UniPoly.from_terms({a: c for (a, _, _), c in self._terms.items()})

    def __add__(self, other: "TriPoly") -> "TriPoly":
        other = _as_tri(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return TriPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "TriPoly":
        return TriPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "TriPoly") -> "TriPoly":
        return self + (-_as_tri(other))

    def __rsub__(self, other) -> "TriPoly":
        return _as_tri(other) - self

    def __mul__(self, other: "TriPoly") -> "TriPoly":
        other = _as_tri(other)
        out: dict[Exps, Fraction] = {}
        for (a1, b1, c1), x in self._terms.items():
            for (a2, b2, c2), y in other._terms.items():
                e = (a1 + a2, b1 + b2, c1 + c2)
                out[e] = out.get(e, Fraction(0)) + x * y
        return TriPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TriPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result, base = TriPoly.constant(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = TriPoly.constant(other)
        return isinstance(other, TriPoly) and self._key == other._key

    def __hash__(self) -> int:
        return hash(("TriPoly", self._key))

    def __repr__(self) -> str:
        return f"TriPoly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    def __call__(self, t, u, v):
        exact = all(isinstance(x, (int, Fraction)) for x in (t, u, v))
        return tri_eval(self, t, u, v, EvalMode.EXACT if exact else EvalMode.APPROX)


def _as_tri(x) -> TriPoly:
    if isinstance(x, TriPoly):
        return x
    if isinstance(x, UniPoly):
        return TriPoly.from_uni(x)
    if isinstance(x, (int, Fraction)):
        return TriPoly.constant(x)
    raise TypeError(f"cannot combine TriPoly with {type(x).__name__}")


def tri_eval(p: TriPoly, t, u, v, mode: EvalMode = EvalMode.APPROX):
    if mode is EvalMode.EXACT:
        x, y, z = (as_fraction(w) for w in (t, u, v))
        return sum((c * x**a * y**b * z**e for (a, b, e), c in p.items()), Fraction(0))
    x, y, z = float(t), float(u), float(v)
    return math.fsum(float(c) * x**a * y**b * z**e for (a, b, e), c in p.items())


def tri_add(a: TriPoly, b: TriPoly) -> TriPoly:
    return a + b


def tri_mul(a: TriPoly, b: TriPoly) -> TriPoly:
    return a * b


def tri_pow(a: TriPoly, n: int) -> TriPoly:
    return a ** n


def tri_compose_uni(outer: UniPoly, inner: TriPoly) -> TriPoly:
    """Return ``outer(inner(t, u, v))`` exactly (Horner in TriPoly)."""
    acc = TriPoly()
    for c in reversed(outer.coeffs):
        acc = acc * inner + TriPoly.constant(c)
    return acc


# ------------------------------------------------------ shifted certificates


def _shift_uni(p: UniPoly, s: Fraction) -> UniPoly:
    # coefficients of p(s + x) via binomial expansion
    n = len(p.coeffs)
    out = [Fraction(0)] * n
    for k, c in enumerate(p.coeffs):
        if c == 0:
            continue
        for j in range(k + 1):
            out[j] += c * comb(k, j) * s ** (k - j)
    return UniPoly(out)


def _shift_tri(p: TriPoly, shifts: Sequence[Fraction]) -> TriPoly:
    s1, s2, s3 = shifts

    def expand(k: int, s: Fraction) -> list[Fraction]:
        return [comb(k, j) * s ** (k - j) for j in range(k + 1)]

    out: dict[Exps, Fraction] = {}
    for (a, b, c), coeff in p.items():
        ea, eb, ec = expand(a, s1), expand(b, s2), expand(c, s3)
        for i, x in enumerate(ea):
            if x == 0:
                continue
            for j, y in enumerate(eb):
                if y == 0:
                    continue
                for k, z in enumerate(ec):
                    if z:
                        key = (i, j, k)
                        out[key] = out.get(key, Fraction(0)) + coeff * x * y * z
    return TriPoly(out)


def shift(p, shifts):
    """Taylor shift: substitute each variable ``x <- shift + x'``."""
    if isinstance(p, UniPoly):
        s = shifts[0] if isinstance(shifts, (tuple, list)) else shifts
        return _shift_uni(p, as_fraction(s))
    if isinstance(p, TriPoly):
        if not isinstance(shifts, (tuple, list)):
            shifts = (shifts, shifts, shifts)
        return _shift_tri(p, [as_fraction(s) for s in shifts])
    raise TypeError(f"expected UniPoly or TriPoly, got {type(p).__name__}")


def shifted_nonneg_certificate(p, shifts) -> bool:
    """True iff ``p(shift + x')`` has only nonnegative coefficients.

    A True answer proves ``p >= 0`` on the shifted orthant ``x >= shift``.
    False is inconclusive.
    """
    for s in (shifts if isinstance(shifts, (tuple, list)) else (shifts,)):
        if as_fraction(s) < 0:
            raise ValueError("shifts must be nonnegative")
    return shift(p, shifts).is_nonnegative()


# ------------------------------------------------------- log-domain evaluation


class LogForm:
    """Vectorized ``log p(e**y)`` for a polynomial with nonnegative coefficients.

    The value is split as ``degree * y + rest(y)`` so that differences such
    as ``q*log Q - log P`` stay accurate for very large ``y`` (t up to
    ``exp(1e12)`` and beyond).
    """

    def __init__(self, p: UniPoly):
        if not p.is_nonnegative():
            raise ValueError("LogForm needs nonnegative coefficients")
        terms = p.terms()
        self.poly = p
        self.degree = p.degree
        self.exps = np.array(sorted(terms), dtype=float)
        self.logc = np.array([math.log(terms[k]) for k in sorted(terms)], dtype=float)

    def _shifted(self, y):
        y = np.asarray(y, dtype=float)
        return self.logc + np.multiply.outer(y, self.exps - self.degree)

    def rest(self, y):
        if self.degree < 0:
            return np.full(np.shape(y), -np.inf)
        z = self._shifted(y)
        m = z.max(axis=-1)
        return m + np.log(np.exp(z - m[..., None]).sum(axis=-1))

    def value(self, y):
        """``log p(e**y)``."""
        return self.degree * np.asarray(y, dtype=float) + self.rest(y)

    def elasticity(self, y):
        """``s p'(s) / p(s)`` at ``s = e**y`` (a weighted mean exponent)."""
        z = self._shifted(y)
        w = np.exp(z - z.max(axis=-1)[..., None])
        return (w * self.exps).sum(axis=-1) / w.sum(axis=-1)


# ------------------------------------------------------------- text grammar

_TOKEN = re.compile(r"\s*(?:(\d+)|([tuv])|(\S))")


def parse_poly(text: str) -> TriPoly:
    """Parse a polynomial in t, u, v (grammar in the module docstring)."""
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    text_stripped = text.rstrip()
    while pos < len(text_stripped):
        m = _TOKEN.match(text_stripped, pos)
        if m is None:  # pragma: no cover - regex always matches
            raise ParseError("unreadable input", text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("var", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^()/":
                raise ParseError(f"unexpected character {ch!r}", text, start)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text_stripped)))
    parser = _Parser(tokens, text)
    result = parser.expr()
    if parser.peek()[0] != "end":
        raise ParseError("trailing input", text, parser.peek()[2])
    return result


class _Parser:
    _VARS = {"t": (1, 0, 0), "u": (0, 1, 0), "v": (0, 0, 1)}

    def __init__(self, tokens, text):
        self.tokens, self.text, self.i = tokens, text, 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}", self.text, tok[2])
        self.i += 1
        return tok

    def expr(self) -> TriPoly:
        acc = self.signed_term()
        while self.peek()[0] in ("+", "-"):
            op = self.peek()[0]
            self.i += 1
            term = self.term()
            acc = acc + term if op == "+" else acc - term
        return acc

    def signed_term(self) -> TriPoly:
        if self.peek()[0] == "-":
            self.i += 1
            return TriPoly.constant(-1) * self.term()
        return self.term()

    def term(self) -> TriPoly:
        acc = self.factor()
        while self.peek()[0] in ("*", "num", "var", "("):
            if self.peek()[0] == "*":
                self.i += 1
            acc = acc * self.factor()
        return acc

    def factor(self) -> TriPoly:
        base = self.atom()
        if self.peek()[0] == "^":
            self.i += 1
            base = base ** int(self.take("num")[1])
        return base

    def atom(self) -> TriPoly:
        kind, val, pos = self.peek()
        if kind == "num":
            self.i += 1
            c = Fraction(int(val))
            if self.peek()[0] == "/":
                self.i += 1
                den = int(self.take("num")[1])
                if den == 0:
                    raise ParseError("zero denominator", self.text, pos)
                c /= den
            return TriPoly.constant(c)
        if kind == "var":
            self.i += 1
            return TriPoly.monomial(*self._VARS[val])
        if kind == "(":
            self.i += 1
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError("expected a number, variable or '('", self.text, pos)


def parse_uni(text: str) -> UniPoly:
    p = parse_poly(text)
    if not p.uses_only_t():
        raise ParseError("univariate polynomial may only use t", text, 0)
    return p.to_uni()


def _format_term(c: Fraction, exps: Sequence[int], names: str) -> str:
    factors = [x if e == 1 else f"{x}^{e}" for x, e in zip(names, exps) if e]
    if not factors:
        return str(c)
    if c == 1:
        return "*".join(factors)
    return "*".join([str(c)] + factors)


def format_poly(p) -> str:
    """Normalized text form, terms in increasing exponent order."""
    if isinstance(p, UniPoly):
        items = [((k,), c) for k, c in sorted(p.terms().items())]
        names = "t"
    else:
        items = list(p.items())
        names = "tuv"
    if not items:
        return "0"
    out = ""
    for e, c in items:
        body = _format_term(abs(c), e, names)
        if not out:
            out = body if c > 0 else "-" + body
        else:
            out += (" + " if c > 0 else " - ") + body
    return out


def poly_to_json(p) -> list[dict]:
    if isinstance(p, UniPoly):
        return [{"coeff": str(c), "exps": [k]} for k, c in sorted(p.terms().items())]
    return [{"coeff": str(c), "exps": list(e)} for e, c in p.items()]


def poly_from_json(data: list[dict], univariate: bool | None = None):
    terms: dict[Exps, Fraction] = {}
    for item in data:
        exps = list(item["exps"])
        exps += [0] * (3 - len(exps))
        key = tuple(int(e) for e in exps)
        terms[key] = terms.get(key, Fraction(0)) + Fraction(item["coeff"])
    tri = TriPoly(terms)
    if univariate is None:
        univariate = all(len(item["exps"]) == 1 for item in data)
    return tri.to_uni() if univariate else tri
