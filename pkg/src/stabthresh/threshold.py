"""Real and integral stabilization thresholds of a polynomial pair.

The real threshold of ``(P, Q)`` on ``t >= eps`` is

    inf { r : q P(t) < Q(t)**q for all q >= r and all t >= eps },

which equals the supremum of the implicit curve r(s) over its domain.  That
supremum is the largest of: r at the domain endpoints, r at the interior
critical points, and the limit ``deg P / deg Q`` at infinity.  The integral
threshold is the least integer ``n0`` with ``n P < Q**n`` for every integer
``n >= n0``; it is certified by exact polynomial arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from .curve import (
    DEFAULT_CONFIG,
    CurveConfig,
    CurvePoint,
    PointKind,
    curve_critical_points,
    curve_domain,
    curve_limit,
    curve_value,
)
from .errors import DomainError, InvalidBaseError, PreconditionError, ThresholdDoesNotExistError
from .oracle import threshold_bracket
from .polycore import EvalMode, UniPoly, as_fraction, shifted_nonneg_certificate, uni_eval, uni_pow

# candidates within this of each other count as ties; finite points win ties
TIE = 1e-12
# a real value this close to an integer is treated as that integer
INTEGER_SNAP = 1e-9


@dataclass(frozen=True)
class ThresholdResult:
    value: float
    attained: CurvePoint | None
    strict_at_value: bool
    certified_bracket: tuple[float, float] | None
    integer_value: int
    epsilon: float
    vacuous: bool = False
    candidates: tuple[CurvePoint, ...] = field(default=(), repr=False)
    integer_exceeds_ceiling: bool = False
    integer_below_ceiling: bool = False

    @property
    def bracket_agrees(self) -> bool | None:
        if self.certified_bracket is None:
            return None
        lo, hi = self.certified_bracket
        return lo - 1e-9 <= self.value <= hi + 1e-9

    def to_json(self) -> dict:
        att = None
        if self.attained is not None:
            s = self.attained.s
            att = {"kind": self.attained.kind.value, "s": None if math.isinf(s) else s, "r": self.attained.r}
        return {
            "value": self.value,
            "bracket": None if self.certified_bracket is None else list(self.certified_bracket),
            "attained": att,
            "strict_at_value": self.strict_at_value,
            "integer": self.integer_value,
            "epsilon": self.epsilon,
            "vacuous": self.vacuous,
            "integer_exceeds_ceiling": self.integer_exceeds_ceiling,
            "integer_below_ceiling": self.integer_below_ceiling,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ThresholdResult":
        att = data.get("attained")
        point = None
        if att is not None:
            s = math.inf if att.get("s") is None else float(att["s"])
            point = CurvePoint(s, float(att["r"]), PointKind(att["kind"]))
        br = data.get("bracket")
        return cls(
            value=float(data["value"]),
            attained=point,
            strict_at_value=bool(data["strict_at_value"]),
            certified_bracket=None if br is None else (float(br[0]), float(br[1])),
            integer_value=int(data["integer"]),
            epsilon=float(data["epsilon"]),
            vacuous=bool(data.get("vacuous", False)),
            integer_exceeds_ceiling=bool(data.get("integer_exceeds_ceiling", False)),
            integer_below_ceiling=bool(data.get("integer_below_ceiling", False)),
        )


@dataclass(frozen=True)
class ShapeReport:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def lemma_shape(P: UniPoly, Q: UniPoly) -> ShapeReport:
    """Whether ``P = sum_{k>=2} a_k t^k`` and ``Q = 1 + sum_{k>=2} b_k t^k``.

    Coefficients must be nonnegative and Q must be nonconstant.  This is the
    class on which thresholds are guaranteed to exist.
    """
    if not P.is_nonnegative() or not Q.is_nonnegative():
        return ShapeReport(False, "coefficients must be nonnegative")
    if P.coeff(0) != 0 or P.coeff(1) != 0:
        return ShapeReport(False, "P has a constant or degree-1 term")
    if Q.coeff(0) != 1:
        return ShapeReport(False, "Q must have constant term 1")
    if Q.coeff(1) != 0:
        return ShapeReport(False, "Q has a degree-1 term")
    if Q.degree < 2:
        return ShapeReport(False, "Q must be nonconstant")
    return ShapeReport(True)


def _check_inputs(P: UniPoly, Q: UniPoly, eps: float) -> None:
    if not float(eps) > 0:
        raise DomainError(f"epsilon must be positive (got {eps!r})", eps, 0.0)
    if not (P.is_nonnegative() and Q.is_nonnegative()):
        raise DomainError("P and Q must have nonnegative coefficients")
    if not uni_eval(Q, float(eps)) > 1.0:
        raise InvalidBaseError(f"Q(eps) = {uni_eval(Q, float(eps))!r} must exceed 1", eps)
    if Q.degree < 1 and P.degree >= 1:
        raise ThresholdDoesNotExistError("deg Q = 0 < deg P: q P(t) eventually exceeds Q**q for every q")


# ------------------------------------------------------------ integer checks


def _positive_on_ray(D: UniPoly, eps: Fraction) -> bool:
    """Exact test of ``D(t) > 0`` for all ``t >= eps``."""
    if D.is_zero() or uni_eval(D, eps, EvalMode.EXACT) <= 0:
        return False
    if shifted_nonneg_certificate(D, [eps]):
        return True
    if D.leading() < 0:
        return False
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(D.coeffs)], x)
    return poly.count_roots(sympy.Rational(eps.numerator, eps.denominator), None) == 0


def integer_holds(P: UniPoly, Q: UniPoly, n: int, eps) -> bool:
    """Exact decision of ``n P(t) < Q(t)**n`` for all ``t >= eps``."""
    if n < 1:
        raise DomainError("n must be a positive integer", n, 1)
    D = uni_pow(Q, n) - UniPoly([n]) * P
    return _positive_on_ray(D, as_fraction(eps))


def _integer_from(P, Q, eps, value: float) -> tuple[int, bool, bool]:
    near = round(value)
    start = int(near) if abs(value - near) <= INTEGER_SNAP else math.ceil(value)
    n = max(start, 1)
    exceeds = False
    for _ in range(64):
        if integer_holds(P, Q, n, eps):
            break
        n += 1
        exceeds = True
    else:
        raise RuntimeError("integer threshold search did not terminate")
    below = False
    while not exceeds and n > 1 and integer_holds(P, Q, n - 1, eps):
        n -= 1
        below = True
    return n, exceeds, below


# --------------------------------------------------------------- thresholds


def real_threshold(
    P: UniPoly,
    Q: UniPoly,
    eps: float,
    certify: bool = True,
    tol: float = 1e-7,
    config: CurveConfig = DEFAULT_CONFIG,
) -> ThresholdResult:
    """Real threshold by the max-formula, with an oracle bracket.

    Parameters
    ----------
    P, Q : UniPoly
        Nonnegative coefficients, ``Q(eps) > 1``.
    eps : float
        Lower end of the ``t`` range; must be positive.
    certify : bool
        Also compute ``certified_bracket`` with the brute-force oracle.
    tol : float
        Width of the oracle bracket.

    Returns
    -------
    ThresholdResult
        ``attained`` names the winning candidate.  ``strict_at_value`` is
        true exactly when the supremum is approached only at infinity, so
        ``q = value`` itself satisfies the strict inequality.  An empty
        curve domain (or ``P = 0``) gives ``value = 0`` with ``vacuous``.
    """
    _check_inputs(P, Q, eps)
    eps = float(eps)
    dom = curve_domain(P, Q, eps, config)
    if dom.is_empty:
        bracket = (0.0, 0.0) if certify else None
        if certify and not P.is_zero():
            b = threshold_bracket(P, Q, eps, tol)
            bracket = (b.lo, b.hi)
        return ThresholdResult(0.0, None, True, bracket, 1, eps, vacuous=True)

    cands: list[CurvePoint] = []
    for s in dom.endpoints():
        cands.append(CurvePoint(s, curve_value(P, Q, s), PointKind.ENDPOINT))
    cands.extend(curve_critical_points(P, Q, dom, config))
    finite_best = max(cands, key=lambda c: c.r)
    best = finite_best
    if dom.has_terminal and Q.degree >= 1:
        lim = CurvePoint(math.inf, float(curve_limit(P, Q).value), PointKind.LIMIT)
        cands.append(lim)
        if lim.r > finite_best.r + TIE * max(1.0, lim.r):
            best = lim
    value = best.r
    strict = best.kind is PointKind.LIMIT

    bracket = None
    if certify:
        b = threshold_bracket(P, Q, eps, tol)
        bracket = (b.lo, b.hi)
    n, exceeds, below = _integer_from(P, Q, eps, value)
    return ThresholdResult(value, best, strict, bracket, n, eps, False, tuple(cands), exceeds, below)


def integer_threshold(P: UniPoly, Q: UniPoly, eps: float) -> int:
    """Least integer ``n0 >= 1`` with ``n P(t) < Q(t)**n`` for all integers ``n >= n0``.

    Starts from the ceiling of the real threshold, which is exact for pairs
    of the shape accepted by :func:`lemma_shape`, and confirms it with an
    exact positivity test of ``Q**n - n P`` on ``[eps, inf)``.
    """
    return real_threshold(P, Q, eps, certify=False).integer_value


@dataclass(frozen=True)
class ProductBound:
    bound: int
    true_integer: int
    true_real: float

    def to_json(self) -> dict:
        return {"bound": self.bound, "true_integer": self.true_integer, "true_real": self.true_real}


def product_threshold_bound(
    results: Sequence[ThresholdResult], bases: Sequence[tuple[UniPoly, UniPoly]], eps: float
) -> ProductBound:
    """Max of the factors' integer thresholds, an upper bound for the product.

    The product pair is ``(sum P_i, prod Q_i)``; its own thresholds are
    computed alongside for comparison.

    Raises
    ------
    PreconditionError
        Some ``Q_i(eps) < 2``, where the bound is not guaranteed.
    """
    if not results or len(results) != len(bases):
        raise PreconditionError("need one result per factor")
    for P_i, Q_i in bases:
        if uni_eval(Q_i, as_fraction(eps), EvalMode.EXACT) < 2:
            raise PreconditionError(f"Q_i(eps) = {float(uni_eval(Q_i, float(eps)))!r} < 2")
    P = sum((p for p, _ in bases[1:]), bases[0][0])
    Q = bases[0][1]
    for _, q in bases[1:]:
        Q = Q * q
    true = real_threshold(P, Q, eps, certify=False)
    return ProductBound(max(r.integer_value for r in results), true.integer_value, true.value)


def monotonicity_guard(P: UniPoly, Q: UniPoly, r0: float, eps: float) -> bool:
    """Whether a pass at ``r0`` already implies a pass at every ``r >= r0``.

    Sufficient conditions: ``r0 >= 1/log 2`` with ``Q(eps) >= 2``;
    ``r0 > 1`` with ``Q(eps) >= 3``; or ``r0`` a positive integer for a pair
    of the shape accepted by :func:`lemma_shape` with ``Q(eps) >= 2``.  Each
    rests on ``r -> Q**r / r`` being nondecreasing once ``r log Q >= 1``.
    """
    if not r0 > 0:
        raise DomainError("r0 must be positive", r0, 0.0)
    q_eps = uni_eval(Q, as_fraction(eps), EvalMode.EXACT)
    if r0 >= 1.0 / math.log(2.0) and q_eps >= 2:
        return True
    if r0 > 1 and q_eps >= 3:
        return True
    if float(r0).is_integer() and q_eps >= 2 and lemma_shape(P, Q):
        return True
    return False
