"""Catalog of rationally elliptic spaces and their polynomial invariants.

Each space expression yields its homotopical and cohomological Poincaré
polynomials, the mixed Hodge analogues where known, and the generator
degrees and Betti numbers consumed by :func:`fh_check`.

Products are additive on homotopy (``P_pi(X x Y) = P_pi(X) + P_pi(Y)``) and
multiplicative on cohomology (Künneth).  Toric quotients carry the data of
the matching product of projective spaces; subspace-arrangement complements
that of a product of punctured affine spaces.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import FHInputError, MixedHodgeUnavailableError, ParseError
from .polycore import TriPoly, UniPoly

# ---------------------------------------------------------------- expressions


class SpaceExpr:
    """Base class for space expressions; subclasses are frozen dataclasses."""

    def to_json(self) -> dict:
        raise NotImplementedError

    def __str__(self) -> str:
        return format_space(self)


@dataclass(frozen=True, eq=True)
class OddSphere(SpaceExpr):
    """``S^(2n+1)``."""

    n: int

    def __post_init__(self):
        _need(self.n >= 1, "odd_sphere needs n >= 1")


@dataclass(frozen=True, eq=True)
class EvenSphere(SpaceExpr):
    """``S^(2n)``."""

    n: int

    def __post_init__(self):
        _need(self.n >= 1, "even_sphere needs n >= 1")


@dataclass(frozen=True, eq=True)
class ComplexProjective(SpaceExpr):
    n: int

    def __post_init__(self):
        _need(self.n >= 1, "cp needs n >= 1")


@dataclass(frozen=True, eq=True)
class PuncturedAffine(SpaceExpr):
    """``C^(n+1)`` minus the origin, homotopy equivalent to ``S^(2n+1)``."""

    n: int

    def __post_init__(self):
        _need(self.n >= 0, "punctured needs n >= 0")


@dataclass(frozen=True, eq=True)
class ToricQuotient(SpaceExpr):
    """Quotient of ``prod (C^(n_i+1) minus 0)`` by a free torus action."""

    ns: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ns", tuple(int(k) for k in self.ns))
        _need(len(self.ns) > 0 and all(k >= 1 for k in self.ns), "toric needs a nonempty list of n_i >= 1")


@dataclass(frozen=True, eq=True)
class ArrangementComplement(SpaceExpr):
    """Rationally elliptic complement of a linear subspace arrangement."""

    ns: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ns", tuple(int(k) for k in self.ns))
        _need(len(self.ns) > 0 and all(k >= 1 for k in self.ns), "arrangement needs a nonempty list of n_i >= 1")


@dataclass(frozen=True, eq=True)
class Product(SpaceExpr):
    parts: tuple[SpaceExpr, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        _need(len(self.parts) > 0, "product needs at least one factor")


def _need(ok: bool, msg: str) -> None:
    if not ok:
        raise ValueError(msg)


# ------------------------------------------------------------- polynomials


def _t(k: int, c: int = 1) -> UniPoly:
    return UniPoly.monomial(k, c)


def _geometric(n: int, step: int = 2) -> UniPoly:
    return UniPoly.from_terms({step * i: 1 for i in range(n + 1)})


def homotopy_poincare(x: SpaceExpr) -> UniPoly:
    """Generating polynomial of the ranks of the rational homotopy groups."""
    if isinstance(x, (OddSphere, PuncturedAffine)):
        return _t(2 * x.n + 1)
    if isinstance(x, EvenSphere):
        return _t(2 * x.n) + _t(4 * x.n - 1)
    if isinstance(x, ComplexProjective):
        return _t(2) + _t(2 * x.n + 1)
    if isinstance(x, ToricQuotient):
        return _sum(_t(2) + _t(2 * k + 1) for k in x.ns)
    if isinstance(x, ArrangementComplement):
        return _sum(_t(2 * k + 1) for k in x.ns)
    if isinstance(x, Product):
        return _sum(homotopy_poincare(p) for p in x.parts)
    raise TypeError(f"not a space expression: {x!r}")


def cohomology_poincare(x: SpaceExpr) -> UniPoly:
    """Poincaré polynomial (generating polynomial of the Betti numbers)."""
    if isinstance(x, (OddSphere, PuncturedAffine)):
        return 1 + _t(2 * x.n + 1)
    if isinstance(x, EvenSphere):
        return 1 + _t(2 * x.n)
    if isinstance(x, ComplexProjective):
        return _geometric(x.n)
    if isinstance(x, ToricQuotient):
        return _prod(_geometric(k) for k in x.ns)
    if isinstance(x, ArrangementComplement):
        return _prod(1 + _t(2 * k + 1) for k in x.ns)
    if isinstance(x, Product):
        return _prod(cohomology_poincare(p) for p in x.parts)
    raise TypeError(f"not a space expression: {x!r}")


def _sum(polys):
    out = None
    for p in polys:
        out = p if out is None else out + p
    return out


def _prod(polys):
    out = None
    for p in polys:
        out = p if out is None else out * p
    return out


def _w(a: int, k: int, c: int = 1) -> TriPoly:
    """``c t^a (uv)^k``."""
    return TriPoly.monomial(a, k, k, c)


def _mh_cp(n: int) -> TriPoly:
    return _sum(_w(2 * i, i) for i in range(n + 1))


def _mh_pi_cp(n: int) -> TriPoly:
    return _w(2, 1) + _w(2 * n + 1, n + 1)


def _mh_punctured(n: int) -> TriPoly:
    return TriPoly.constant(1) + _w(2 * n + 1, n + 1)


def mh_poly(x: SpaceExpr) -> TriPoly:
    """Cohomological mixed Hodge polynomial ``MH(t, u, v)``.

    Odd spheres use the data of the punctured affine space they retract
    from, and ``S^2`` that of ``CP^1``.

    Raises
    ------
    MixedHodgeUnavailableError
        For ``S^(2n)`` with ``n >= 2``, which carries no algebraic structure
        with known mixed Hodge data.
    """
    if isinstance(x, (OddSphere, PuncturedAffine)):
        return _mh_punctured(x.n)
    if isinstance(x, EvenSphere):
        if x.n == 1:
            return _mh_cp(1)
        raise MixedHodgeUnavailableError(f"no mixed Hodge polynomial known for S^{2 * x.n}")
    if isinstance(x, ComplexProjective):
        return _mh_cp(x.n)
    if isinstance(x, ToricQuotient):
        return _prod(_mh_cp(k) for k in x.ns)
    if isinstance(x, ArrangementComplement):
        return _prod(_mh_punctured(k) for k in x.ns)
    if isinstance(x, Product):
        return _prod(mh_poly(p) for p in x.parts)
    raise TypeError(f"not a space expression: {x!r}")


def mh_pi_poly(x: SpaceExpr) -> TriPoly:
    """Homotopical mixed Hodge polynomial ``MH_pi(t, u, v)``; see :func:`mh_poly`."""
    if isinstance(x, (OddSphere, PuncturedAffine)):
        return _w(2 * x.n + 1, x.n + 1)
    if isinstance(x, EvenSphere):
        if x.n == 1:
            return _mh_pi_cp(1)
        raise MixedHodgeUnavailableError(f"no mixed Hodge polynomial known for S^{2 * x.n}")
    if isinstance(x, ComplexProjective):
        return _mh_pi_cp(x.n)
    if isinstance(x, ToricQuotient):
        return _sum(_mh_pi_cp(k) for k in x.ns)
    if isinstance(x, ArrangementComplement):
        return _sum(_w(2 * k + 1, k + 1) for k in x.ns)
    if isinstance(x, Product):
        return _sum(mh_pi_poly(p) for p in x.parts)
    raise TypeError(f"not a space expression: {x!r}")


def has_mixed_hodge(x: SpaceExpr) -> bool:
    try:
        mh_poly(x)
    except MixedHodgeUnavailableError:
        return False
    return True


# ------------------------------------------------------------ FH consistency


@dataclass(frozen=True)
class FHData:
    odd_degrees: tuple[int, ...]
    even_degrees: tuple[int, ...]
    betti: tuple[int, ...]


def fh_data(x: SpaceExpr) -> FHData:
    """Generator degrees of the minimal model and Betti numbers of ``x``."""
    gens = homotopy_poincare(x)
    odd, even = [], []
    for k, c in sorted(gens.terms().items()):
        (odd if k % 2 else even).extend([k] * int(c))
    betti = tuple(int(c) for c in cohomology_poincare(x).coeffs)
    return FHData(tuple(odd), tuple(even), betti)


@dataclass(frozen=True)
class RuleResult:
    passed: bool
    detail: str

    def to_json(self) -> dict:
        return {"pass": self.passed, "detail": self.detail}


RULES = ("a", "b", "c", "d", "e", "poincare_duality", "betti_binomial", "total_betti_bound", "hilali_at_1")


@dataclass(frozen=True)
class FHReport:
    formal_dimension: int
    chi: int
    chi_pi: int
    checks: dict[str, RuleResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.checks.values())

    def failures(self) -> list[str]:
        return [k for k in RULES if not self.checks[k].passed]

    def to_json(self) -> dict:
        return {
            "formal_dimension": self.formal_dimension,
            "chi": self.chi,
            "chi_pi": self.chi_pi,
            "passed": self.passed,
            "checks": {k: self.checks[k].to_json() for k in RULES},
        }


def fh_check(odd_degrees: Sequence[int], even_degrees: Sequence[int], betti: Sequence[int]) -> FHReport:
    """Friedlander-Halperin constraints and Betti-number facts.

    Parameters
    ----------
    odd_degrees, even_degrees : sequences of int
        Degrees of the odd (>= 3) and even (>= 2) generators of rational
        homotopy, with multiplicity.
    betti : sequence of int
        ``betti[k] = dim H^k``; ``betti[0]`` must be 1.

    Raises
    ------
    FHInputError
        Malformed data: wrong parities, degrees out of range, ``betti[0] != 1``
        or negative Betti numbers.
    """
    odd = [int(d) for d in odd_degrees]
    even = [int(d) for d in even_degrees]
    b = [int(c) for c in betti]
    if any(d < 3 or d % 2 == 0 for d in odd):
        raise FHInputError(f"odd degrees must be odd and >= 3: {odd}")
    if any(d < 2 or d % 2 for d in even):
        raise FHInputError(f"even degrees must be even and >= 2: {even}")
    if not b or b[0] != 1:
        raise FHInputError("betti[0] must be 1")
    if any(c < 0 for c in b):
        raise FHInputError("Betti numbers must be nonnegative")
    n = max(k for k, c in enumerate(b) if c != 0)
    b = b[: n + 1]
    sx, sy = sum(odd), sum(even)
    chi_pi = len(even) - len(odd)
    chi = sum((-1) ** k * c for k, c in enumerate(b))
    checks: dict[str, RuleResult] = {}
    checks["a"] = RuleResult(sx <= 2 * n - 1 and sy <= n, f"sum odd = {sx} <= {2 * n - 1}, sum even = {sy} <= {n}")
    rhs_b = sx - sum(d - 1 for d in even)
    checks["b"] = RuleResult(n == rhs_b, f"n = {n}, sum odd - sum(even - 1) = {rhs_b}")
    checks["c"] = RuleResult(chi_pi <= 0, f"chi_pi = {chi_pi}")
    checks["d"] = RuleResult(chi >= 0, f"chi = {chi}")
    checks["e"] = RuleResult((chi > 0) == (chi_pi == 0), f"chi = {chi}, chi_pi = {chi_pi}")
    dual = all(b[m] == b[n - m] for m in range(n + 1))
    edge = n >= 2 and b[1] == 0 and b[n - 1] == 0
    checks["poincare_duality"] = RuleResult(dual and edge, f"b = {b}")
    binom = [m for m in range(1, n) if 2 * b[m] > math.comb(n, m)]
    checks["betti_binomial"] = RuleResult(not binom, f"violated at m = {binom}" if binom else "b_m <= C(n,m)/2")
    total = sum(b)
    checks["total_betti_bound"] = RuleResult(total <= 2 ** (n - 1) + 1, f"sum b = {total} <= {2 ** (n - 1) + 1}")
    n_pi = len(odd) + len(even)
    checks["hilali_at_1"] = RuleResult(n_pi <= total, f"dim pi = {n_pi} <= dim H = {total}")
    return FHReport(n, chi, chi_pi, checks)


def fh_check_space(x: SpaceExpr) -> FHReport:
    d = fh_data(x)
    return fh_check(d.odd_degrees, d.even_degrees, d.betti)


@dataclass(frozen=True)
class HilaliResult:
    passed: bool
    homotopy_rank: Fraction
    homology_rank: Fraction

    def to_json(self) -> dict:
        return {"pass": self.passed, "homotopy_at_1": int(self.homotopy_rank), "homology_at_1": int(self.homology_rank)}


def hilali_check(x: SpaceExpr) -> HilaliResult:
    """Compare ``P_pi(1)`` with ``P(1)`` (total ranks of homotopy and homology)."""
    a = homotopy_poincare(x)(Fraction(1))
    b = cohomology_poincare(x)(Fraction(1))
    return HilaliResult(a <= b, a, b)


# ------------------------------------------------------------ text grammar

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<int>\d+)|(?P<punct>[(),;]))")
_UNARY = {
    "odd_sphere": OddSphere,
    "even_sphere": EvenSphere,
    "cp": ComplexProjective,
    "punctured": PuncturedAffine,
}
_LIST = {"toric": ToricQuotient, "arrangement": ArrangementComplement}
_ALIAS = re.compile(r"^(S|CP)(\d+)$", re.IGNORECASE)


def _alias(word: str, text: str, pos: int) -> SpaceExpr | None:
    m = _ALIAS.match(word)
    if not m:
        return None
    k = int(m.group(2))
    if m.group(1).upper() == "CP":
        return ComplexProjective(k)
    if k < 2:
        raise ParseError(f"S{k} is not simply connected", text, pos)
    return OddSphere((k - 1) // 2) if k % 2 else EvenSphere(k // 2)


def parse_space(text: str) -> SpaceExpr:
    """Parse ``cp(2)``, ``product(S3; toric(1,2))``, ``S4``, ``CP3`` and so on."""
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    i = 0

    def peek():
        return tokens[i]

    def take(kind, value=None):
        nonlocal i
        tok = tokens[i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r}", text, tok[2])
        i += 1
        return tok

    def integer() -> int:
        return int(take("int")[1])

    def expr() -> SpaceExpr:
        kind, word, at = take("name")
        low = word.lower()
        alias = _alias(word, text, at)
        try:
            if alias is not None and peek()[1] != "(":
                return alias
            if low in _UNARY:
                take("punct", "(")
                n = integer()
                take("punct", ")")
                return _UNARY[low](n)
            if low in _LIST:
                take("punct", "(")
                ns = [integer()]
                while peek()[1] == ",":
                    take("punct", ",")
                    ns.append(integer())
                take("punct", ")")
                return _LIST[low](tuple(ns))
            if low == "product":
                take("punct", "(")
                parts = [expr()]
                while peek()[1] in (";", ","):
                    take("punct")
                    parts.append(expr())
                take("punct", ")")
                return Product(tuple(parts))
        except ValueError as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(str(e), text, at) from None
        raise ParseError(f"unknown space {word!r}", text, at)

    out = expr()
    take("end")
    return out


def format_space(x: SpaceExpr) -> str:
    if isinstance(x, OddSphere):
        return f"odd_sphere({x.n})"
    if isinstance(x, EvenSphere):
        return f"even_sphere({x.n})"
    if isinstance(x, ComplexProjective):
        return f"cp({x.n})"
    if isinstance(x, PuncturedAffine):
        return f"punctured({x.n})"
    if isinstance(x, ToricQuotient):
        return "toric(" + ",".join(map(str, x.ns)) + ")"
    if isinstance(x, ArrangementComplement):
        return "arrangement(" + ",".join(map(str, x.ns)) + ")"
    if isinstance(x, Product):
        return "product(" + "; ".join(format_space(p) for p in x.parts) + ")"
    raise TypeError(f"not a space expression: {x!r}")


_JSON_NAMES = {
    OddSphere: "odd_sphere",
    EvenSphere: "even_sphere",
    ComplexProjective: "cp",
    PuncturedAffine: "punctured",
    ToricQuotient: "toric",
    ArrangementComplement: "arrangement",
    Product: "product",
}


def space_to_json(x: SpaceExpr) -> dict:
    name = _JSON_NAMES[type(x)]
    if isinstance(x, Product):
        return {"node": name, "parts": [space_to_json(p) for p in x.parts]}
    if isinstance(x, (ToricQuotient, ArrangementComplement)):
        return {"node": name, "ns": list(x.ns)}
    return {"node": name, "n": x.n}


def space_from_json(data) -> SpaceExpr:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        name = data["node"]
        if name == "product":
            return Product(tuple(space_from_json(p) for p in data["parts"]))
        if name in _LIST:
            return _LIST[name](tuple(data["ns"]))
        return _UNARY[name](int(data["n"]))
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed space JSON ({e})", json.dumps(data), 0) from None


for _cls in _JSON_NAMES:
    _cls.to_json = space_to_json  # type: ignore[attr-defined]
    _cls.__str__ = format_space  # type: ignore[assignment]


# ---------------------------------------------------------------- listing


def catalog_entries() -> list[SpaceExpr]:
    """The spaces the library knows closed forms for, in a fixed order."""
    out: list[SpaceExpr] = []
    out += [OddSphere(n) for n in range(1, 11)]
    out += [EvenSphere(n) for n in range(1, 11)]
    out += [ComplexProjective(n) for n in range(1, 11)]
    out += [PuncturedAffine(n) for n in range(1, 4)]
    out += [ToricQuotient(ns) for ns in ((1, 1), (1, 2), (2, 2), (2, 3), (3, 3, 2))]
    out += [ArrangementComplement(ns) for ns in ((1,), (1, 1), (1, 2), (2, 3, 4))]
    out += [
        Product((OddSphere(1), OddSphere(1))),
        Product((EvenSphere(1), ComplexProjective(2))),
        Product((ComplexProjective(2), ComplexProjective(3))),
        Product((EvenSphere(2), OddSphere(2))),
    ]
    return out
