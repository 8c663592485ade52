"""Brute-force verification of ``q P(t) < Q(t)**q`` without Lambert W.

Everything is evaluated at ``t = e**y`` through
:class:`~stabthresh.polycore.LogForm`, so with ``A = log P`` and
``B = log Q`` the inequality reads

    h(q, y) = q B - log q - A > 0.

For fixed ``y`` the map ``q -> h`` is convex with minimum ``1 + log B - A`` at
``q = 1/B``.  Hence every ``q' >= q`` passes at ``y`` exactly when
``h(q, y) > 0`` and either ``q B >= 1`` or the minimum is positive.  The set
of such ``q`` is upward closed, which is what makes bisection on ``q`` valid.

Large ``t`` is handled by a closed-form tail: for ``t >= 1``,
``P(t) <= (sum a_k) t**deg P`` and ``Q(t)**q >= b**q t**(q deg Q)`` with ``b``
the leading coefficient of ``Q``.  Witnesses are re-verified exactly with
rational arithmetic, or with outward-rounded interval arithmetic when the
exact powers would be too large.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import iv

from .errors import DomainError, InvalidBaseError, StabError, TailNotCertifiedError, ThresholdDoesNotExistError
from .polycore import EvalMode, LogForm, UniPoly, uni_eval, uni_pow

# exact rational comparisons are attempted below this many bits
EXACT_BIT_BUDGET = 2_000_000
INTERVAL_PREC = (256, 1024, 4096)
SNAP_DENOMINATOR = 2 ** 20
SNAP_RADIUS = 1e-12
# |h| below this (relative) is decided exactly rather than in floating point
MARGIN = 1e-9
# beyond this log t the tail is not searched for eventual failures
MAX_LOG_T = 1e15

_iv_lock = threading.Lock()


class UndecidedComparisonError(StabError):
    """Exact and interval comparisons both failed to separate the two sides."""


@dataclass(frozen=True)
class GridSpec:
    """Sampling plan in ``log t``.

    ``points`` values uniform in ``log t`` on ``[eps, t_max]`` (default
    ``max(10, 10 eps)``), followed by ``far_points`` values geometric in
    ``log t`` up to the tail start.
    """

    t_max: float | None = None
    points: int = 8192
    q_step: float = 1e-3
    far_points: int = 2048

    def __post_init__(self):
        if self.points < 16:
            raise ValueError("grid needs at least 16 points")
        if not self.q_step > 0:
            raise ValueError("q_step must be positive")

    def doubled(self) -> "GridSpec":
        return GridSpec(self.t_max, 2 * self.points, self.q_step, 2 * self.far_points)


DEFAULT_GRID = GridSpec()


@dataclass(frozen=True)
class Violation:
    """A point where ``q P(t) >= Q(t)**q``.

    ``t`` is ``inf`` when the witness lies beyond double range; ``log_t`` is
    always finite.  ``exact`` is true when the comparison was decided by
    rational or outward-rounded interval arithmetic.
    """

    q: float
    t: float
    lhs: float
    rhs: float
    log_t: float
    exact: bool = True
    equality: bool = False

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "t": None if math.isinf(self.t) else self.t,
            "log_t": self.log_t,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "equality": self.equality,
        }


@dataclass(frozen=True)
class Holds:
    """The strict inequality passed on the grid and the tail is certified."""

    q: float
    epsilon: float
    tail_log_t: float
    points: int

    def __bool__(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"holds": True, "q": self.q, "epsilon": self.epsilon, "tail_log_t": self.tail_log_t}


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    witness: Violation | None = None

    def __iter__(self):
        return iter((self.lo, self.hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


# ---------------------------------------------------------------- exact checks


def snap_rational(x: float) -> Fraction:
    """Small-denominator rational within ``SNAP_RADIUS`` (relative) of ``x``, else ``x`` exactly."""
    exact = Fraction(x)
    near = exact.limit_denominator(SNAP_DENOMINATOR)
    if abs(near - exact) <= SNAP_RADIUS * max(1.0, abs(x)):
        return near
    return exact


def _bits(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def _iv_poly(p: UniPoly, t):
    acc = iv.mpf(0)
    for c in reversed(p.coeffs):
        acc = acc * t + iv.mpf(c.numerator) / c.denominator
    return acc


def _interval_sign(P: UniPoly, Q: UniPoly, q: Fraction, t) -> int | None:
    for prec in INTERVAL_PREC:
        with _iv_lock:
            saved = iv.prec
            iv.prec = prec
            try:
                tt = iv.mpf(t.numerator) / t.denominator if isinstance(t, Fraction) else iv.mpf(t)
                qq = iv.mpf(q.numerator) / q.denominator
                pv, qv = _iv_poly(P, tt), _iv_poly(Q, tt)
                if pv.b <= 0:
                    return -1
                lhs = iv.log(qq) + iv.log(pv)
                rhs = qq * iv.log(qv)
                if lhs.a > rhs.b:
                    return 1
                if lhs.b < rhs.a:
                    return -1
            finally:
                iv.prec = saved
    return None


def compare_power(pv: Fraction, qv: Fraction, q: Fraction) -> int | None:
    """Sign of ``q * pv - qv**q`` for rationals ``pv >= 0``, ``qv > 0``, ``q > 0``.

    Uses ``(q pv)**m`` versus ``qv**p`` for ``q = p/m`` while the integers
    stay below :data:`EXACT_BIT_BUDGET` bits, outward-rounded interval
    logarithms beyond that.  ``None`` means neither could separate the sides.
    """
    lhs = q * pv
    if lhs <= 0:
        return -1
    p, m = q.numerator, q.denominator
    if p * _bits(qv) + m * _bits(lhs) <= EXACT_BIT_BUDGET:
        a, b = lhs ** m, qv ** p
        return (a > b) - (a < b)
    for prec in INTERVAL_PREC:
        with _iv_lock:
            saved = iv.prec
            iv.prec = prec
            try:
                ll = iv.log(iv.mpf(lhs.numerator) / lhs.denominator)
                rr = (iv.mpf(p) / m) * iv.log(iv.mpf(qv.numerator) / qv.denominator)
                if ll.a > rr.b:
                    return 1
                if ll.b < rr.a:
                    return -1
            finally:
                iv.prec = saved
    return None


def compare_exact(P: UniPoly, Q: UniPoly, q: Fraction, t) -> int | None:
    """Sign of ``q P(t) - Q(t)**q`` at rational ``q > 0`` and ``t``.

    ``t`` is a :class:`~fractions.Fraction` or an ``mpmath.mpf`` (itself a
    binary rational, used for points beyond double range).  See
    :func:`compare_power` for the arithmetic.
    """
    if isinstance(t, Fraction):
        return compare_power(uni_eval(P, t, EvalMode.EXACT), uni_eval(Q, t, EvalMode.EXACT), q)
    return _interval_sign(P, Q, q, t)


def _point(y: float):
    """A rational t near e**y; binary ``mpf`` beyond double range."""
    if y < 700.0:
        return snap_rational(math.exp(y))
    with mpmath.workprec(256):
        t = mpmath.exp(mpmath.mpf(y))
    if y < 1e5:
        man, exp = t.man_exp
        return Fraction(man) * Fraction(2) ** exp
    return t


def exact_violation(P: UniPoly, Q: UniPoly, q: float, log_t: float) -> Violation | None:
    """Re-verify a candidate witness at rational points within 1e-12 of it.

    Returns the :class:`Violation` (with the snapped ``q`` and ``t``) when
    ``q P(t) >= Q(t)**q`` is confirmed, ``None`` when the strict inequality
    is confirmed instead.

    Raises
    ------
    UndecidedComparisonError
        Neither rational nor interval arithmetic could decide.
    """
    qf = snap_rational(q)
    t = _point(log_t)
    sign = compare_exact(P, Q, qf, t)
    huge = not isinstance(t, Fraction) or log_t >= 700.0
    if sign is None:
        raise UndecidedComparisonError(f"cannot decide q = {q!r} at log t = {log_t!r}")
    if sign < 0:
        return None
    lP, lQ = LogForm(P), LogForm(Q)
    qv = float(qf)
    y = log_t if huge else math.log(float(t))
    with np.errstate(over="ignore"):
        lhs = float(np.exp(math.log(qv) + float(lP.value(y))))
        rhs = float(np.exp(qv * float(lQ.value(y))))
    t_out = math.inf if huge else float(t)
    return Violation(qv, t_out, lhs, rhs, y, True, sign == 0)


# ------------------------------------------------------------------ log model


class _Model:
    def __init__(self, P: UniPoly, Q: UniPoly, eps: float):
        eps = float(eps)
        if not eps > 0:
            raise DomainError(f"epsilon must be positive (got {eps!r})", eps, 0.0)
        if not (P.is_nonnegative() and Q.is_nonnegative()):
            raise DomainError("P and Q must have nonnegative coefficients")
        if not uni_eval(Q, eps) > 1.0:
            raise InvalidBaseError(f"Q(eps) = {uni_eval(Q, eps)!r} must exceed 1", eps)
        self.P, self.Q, self.eps = P, Q, eps
        self.y0 = math.log(eps)
        self.lP, self.lQ = LogForm(P), LogForm(Q)
        self.dP, self.dQ = P.degree, Q.degree
        self.limit = None if self.dQ <= 0 else Fraction(max(self.dP, 0), self.dQ)
        if not P.is_zero():
            self.log_sum_a = math.log(float(sum(P.coeffs)))
        self.log_b = math.log(float(Q.leading()))

    def AB(self, ys: np.ndarray):
        with np.errstate(divide="ignore"):
            return self.lP.value(ys), np.log(self.lQ.value(ys))

    def tail_start(self, q: float) -> float | None:
        """A log t beyond which every ``q' >= q`` holds strictly, or None."""
        if self.P.is_zero():
            return self.y0
        if self.dQ <= 0 and self.dP <= 0:
            return self.y0
        gap = q * self.dQ - self.dP
        if gap <= 0:
            return None
        y_star = (math.log(q) + self.log_sum_a - q * self.log_b) / gap
        y_star += 1e-9 * (1.0 + abs(y_star))
        y_slope = (1.0 / q - self.log_b) / self.dQ
        return max(0.0, self.y0, y_star, y_slope)

    def grid(self, y_top: float, spec: GridSpec) -> np.ndarray:
        near_top = math.log(spec.t_max) if spec.t_max else max(math.log(10.0), self.y0 + math.log(10.0))
        near_top = max(near_top, self.y0)
        near = np.linspace(self.y0, near_top, spec.points)
        if y_top <= near_top:
            return near[near <= y_top] if y_top > self.y0 else near[:1]
        lo = max(near_top, 1.0)
        far = np.geomspace(lo, y_top, spec.far_points)
        return np.concatenate([near, far[far > near_top]])


def _h(q, A, B):
    with np.errstate(divide="ignore", invalid="ignore"):
        return q * np.exp(B) - np.log(q) - A


def _upper_ok(q, A, lnB):
    """Every q' >= q passes at these points (vectorized)."""
    B = np.exp(lnB)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = q * B - np.log(q) - A
        no_root = 1.0 + lnB - A > 0
    return (h > 0) & ((q * B >= 1.0) | no_root)


def _rho(A: np.ndarray, lnB: np.ndarray, iters: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise bracket ``[lo, hi]`` for the least q from which all larger q pass."""
    B = np.exp(lnB)
    with np.errstate(divide="ignore", invalid="ignore"):
        no_root = ~(1.0 + lnB - A <= 0)
    lo = np.where(no_root, 0.0, 1.0 / B)
    hi = np.where(no_root, 0.0, 2.0 / B)
    active = ~no_root
    for _ in range(4000):
        bad = active & ~_upper_ok(hi, A, lnB)
        if not bad.any():
            break
        lo = np.where(bad, hi, lo)
        hi = np.where(bad, 2.0 * hi, hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = _upper_ok(mid, A, lnB)
        upd = active & (mid > lo) & (mid < hi)
        if not upd.any():
            break
        hi = np.where(upd & ok, mid, hi)
        lo = np.where(upd & ~ok, mid, lo)
    return lo, hi


def _rho_scalar(m: _Model, y: float) -> tuple[float, float]:
    """Scalar version of :func:`_rho` at one log t."""
    A = float(m.lP.value(y))
    lnB = math.log(float(m.lQ.value(y)))
    B = math.exp(lnB)
    if not 1.0 + lnB - A <= 0:
        return 0.0, 0.0

    def ok(q: float) -> bool:
        return q * B - math.log(q) - A > 0 and q * B >= 1.0

    lo, hi = 1.0 / B, 2.0 / B
    while not ok(hi):
        lo, hi = hi, 2.0 * hi
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return lo, hi
        if ok(mid):
            hi = mid
        else:
            lo = mid


# ------------------------------------------------------------- verification


def _violation_on_grid(m: _Model, q: float, ys: np.ndarray) -> Violation | None | bool:
    """Smallest-t exact violation on the grid; False if some point stays undecided."""
    A, lnB = m.AB(ys)
    h = _h(q, A, lnB)
    scale = np.maximum(1.0, np.maximum(np.abs(A), q * np.exp(lnB)))
    suspect = np.nonzero(h <= MARGIN * scale)[0]
    for i in suspect:
        v = exact_violation(m.P, m.Q, q, float(ys[i]))
        if v is not None:
            return v
    return None


def _eventual_violation(m: _Model, q: float) -> Violation | None:
    """Witness for ``q < deg P / deg Q``, where the inequality fails for large t."""
    y = max(m.y0, 1.0)
    while y < MAX_LOG_T:
        A, lnB = m.AB(np.array([y]))
        if float(_h(q, A, lnB)[0]) < 0:
            v = exact_violation(m.P, m.Q, q, y)
            if v is not None:
                return v
        y *= 2.0
    return None


def _tail_for_limit(m: _Model, q: Fraction) -> float | None:
    """Tail start when ``q deg Q == deg P``, from ``D = Q**p - (q P)**m``.

    D is a polynomial; its positive roots are below the Cauchy bound, so its
    sign for large t is the sign of its leading coefficient.  Returns None
    when that sign is not positive.
    """
    p, den = q.numerator, q.denominator
    if p > 200 or den > 200:
        return None
    D = uni_pow(m.Q, p) - uni_pow(UniPoly([q]) * m.P, den)
    if D.is_zero() or D.leading() <= 0:
        return None
    lead = D.leading()
    bound = 1 + max(abs(c) / lead for c in D.coeffs[:-1]) if D.degree > 0 else 1
    return max(m.y0, math.log(float(bound)) + 1e-9)


def _tail(m: _Model, q: float) -> float | None:
    y = m.tail_start(q)
    if y is None and m.dQ > 0:
        qf = snap_rational(q)
        if qf * m.dQ == m.dP:
            y = _tail_for_limit(m, qf)
    return y


def tail_start(P: UniPoly, Q: UniPoly, q: float, eps: float) -> float | None:
    """``log T*``: past ``T*`` every exponent ``q' >= q`` passes strictly.

    None when no analytic tail bound exists (``q deg Q < deg P``, or the
    boundary case with a nonpositive leading coefficient).
    """
    return _tail(_Model(P, Q, eps), float(q))


def verify_inequality(P: UniPoly, Q: UniPoly, q: float, eps: float, grid: GridSpec = DEFAULT_GRID):
    """Check ``q P(t) < Q(t)**q`` for all ``t >= eps``.

    Returns
    -------
    Holds or Violation
        :class:`Holds` when every grid point passes strictly and the tail is
        certified; otherwise the smallest-t exact-verified :class:`Violation`.

    Raises
    ------
    TailNotCertifiedError
        ``q deg Q <= deg P`` and no witness could be produced, or the exact
        leading-order comparison at ``q = deg P / deg Q`` is inconclusive.
    """
    q = float(q)
    if not q > 0:
        raise DomainError("q must be positive", q, 0.0)
    m = _Model(P, Q, eps)
    if P.is_zero():
        return Holds(q, m.eps, m.y0, 0)
    y_tail = _tail(m, q)
    if y_tail is None:
        ys = m.grid(max(m.y0 + math.log(10.0), 1e4), grid)
        v = _violation_on_grid(m, q, ys)
        if v is None:
            v = _eventual_violation(m, q)
        if v is None:
            raise TailNotCertifiedError(
                f"q = {q!r} does not exceed deg P / deg Q = {m.dP}/{m.dQ}; tail cannot be certified"
            )
        return v
    ys = m.grid(y_tail, grid)
    v = _violation_on_grid(m, q, ys)
    if v is not None:
        return v
    return Holds(q, m.eps, y_tail, len(ys))


def find_violation(
    P: UniPoly, Q: UniPoly, q_lo: float, q_hi: float, eps: float, grid: GridSpec = DEFAULT_GRID
) -> Violation | None:
    """Lexicographically smallest exact-verified ``(q, t)`` grid witness.

    ``q`` runs over ``q_lo + k * q_step`` and ``q_hi``; ``t`` over the grid
    up to the tail start of ``q_hi`` (or a fixed far horizon when that tail
    does not exist).  Exponents below ``deg P / deg Q`` with no grid witness
    fall back to a witness at large ``t``.
    """
    q_lo, q_hi = float(q_lo), float(q_hi)
    if not 0 < q_lo <= q_hi:
        raise DomainError("need 0 < q_lo <= q_hi", (q_lo, q_hi))
    m = _Model(P, Q, eps)
    if P.is_zero():
        return None
    n = int(math.floor((q_hi - q_lo) / grid.q_step + 1e-9))
    qs = [q_lo + k * grid.q_step for k in range(n + 1)]
    if qs[-1] < q_hi:
        qs.append(q_hi)
    tails = [_tail(m, q) for q in qs]
    finite = [y for y in tails if y is not None]
    y_top = max(finite) if finite else 0.0
    y_top = max(y_top, m.y0 + math.log(10.0))
    if any(y is None for y in tails):
        y_top = max(y_top, 1e4)
    ys = m.grid(min(y_top, 1e6), grid)
    A, lnB = m.AB(ys)
    scale = np.maximum(1.0, np.abs(A))
    for q, y_tail in zip(qs, tails):
        h = _h(q, A, lnB)
        suspect = np.nonzero(h <= MARGIN * np.maximum(scale, q * np.exp(lnB)))[0]
        for i in suspect:
            if y_tail is not None and ys[i] > y_tail:
                break
            v = exact_violation(P, Q, q, float(ys[i]))
            if v is not None:
                return v
        if y_tail is None:
            v = _eventual_violation(m, q)
            if v is not None:
                return v
    return None


# ---------------------------------------------------------------- bracketing


def _refine_max(m: _Model, ys: np.ndarray, rho_hi: np.ndarray, i: int) -> tuple[float, float, float]:
    """Ternary search for the local max of the pointwise threshold near ys[i]."""
    a = ys[max(i - 1, 0)]
    b = ys[min(i + 1, len(ys) - 1)]
    best = (float(rho_hi[i]), float(ys[i]))
    f = lambda y: _rho_scalar(m, y)[1]  # noqa: E731
    for _ in range(80):
        if b - a <= 1e-13 * (1.0 + abs(a)):
            break
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        f1, f2 = f(m1), f(m2)
        for val, y in ((f1, m1), (f2, m2)):
            if val > best[0]:
                best = (val, y)
        if f1 < f2:
            a = m1
        else:
            b = m2
    lo, hi = _rho_scalar(m, best[1])
    return lo, hi, float(best[1])


def _sup_on_grid(m: _Model, ys: np.ndarray, top_k: int = 6) -> tuple[float, float, float]:
    A, lnB = m.AB(ys)
    lo, hi = _rho(A, lnB)
    if not (hi > 0).any():
        return 0.0, 0.0, float(ys[0])
    # refine the largest local maxima
    interior = np.r_[True, hi[1:] >= hi[:-1]] & np.r_[hi[:-1] >= hi[1:], True]
    cand = np.nonzero(interior & (hi > 0))[0]
    cand = cand[np.argsort(-hi[cand], kind="stable")][:top_k]
    best = (-1.0, -1.0, float(ys[0]))
    for i in cand:
        r = _refine_max(m, ys, hi, int(i))
        if r[1] > best[1]:
            best = r
    return best


def threshold_bracket(
    P: UniPoly, Q: UniPoly, eps: float, tol: float = 1e-6, grid: GridSpec = DEFAULT_GRID
) -> Bracket:
    """Bracket the real threshold by sweeping the definition directly.

    The pointwise threshold (least q from which all larger q pass at a
    given t) is bisected at every grid point; its largest local maxima are
    refined by ternary search.  ``hi`` then passes at every grid point for
    all larger q and is tail-certified; ``lo`` carries an exact-verified
    witness, or sits just below ``deg P / deg Q`` where the inequality fails
    for large t.

    Raises
    ------
    ThresholdDoesNotExistError
        ``deg Q = 0 < deg P``: the inequality fails for every q eventually.
    """
    if tol < 1e-8:
        raise DomainError("tol must be at least 1e-8", tol, 1e-8)
    m = _Model(P, Q, eps)
    if P.is_zero():
        return Bracket(0.0, 0.0)
    if m.dQ <= 0 and m.dP >= 1:
        raise ThresholdDoesNotExistError("deg Q = 0 < deg P: no exponent works for all large t")
    L = float(m.limit) if m.limit is not None else 0.0
    y_top = max(m.y0 + math.log(10.0), 1e3)
    witness = None
    for _ in range(8):
        ys = m.grid(y_top, grid)
        lo_g, hi_g, y_star = _sup_on_grid(m, ys)
        hi = max(hi_g, L) + 0.45 * tol
        y_tail = m.tail_start(hi)
        if y_tail > ys[-1]:
            y_top = y_tail
            continue
        break
    else:
        raise TailNotCertifiedError("tail start kept moving; grid did not converge")

    lo = lo_g
    if hi_g > 0 and lo_g >= L - 0.45 * tol:
        margin = 1e-11 * max(1.0, lo_g)
        while margin < 0.25 * tol:
            witness = exact_violation(m.P, m.Q, lo_g - margin, y_star)
            if witness is not None:
                lo = witness.q
                break
            margin *= 4.0
        else:
            lo = lo_g - 0.25 * tol
    elif L > 0:
        q_w = L - 0.45 * tol
        witness = _eventual_violation(m, q_w)
        lo = witness.q if witness is not None else lo_g
    return Bracket(min(lo, hi), hi, witness)
