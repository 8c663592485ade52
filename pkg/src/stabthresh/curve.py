"""The implicit curve r(s): largest solution of ``r * P(s) = Q(s)**r``.

For fixed s the line ``x -> P(s) x`` meets ``x -> Q(s)**x`` at two points, one
(tangency) or none.  Tangency happens when ``P(s) = e * log Q(s)``, so the
curve lives on ``{s >= eps : P(s) >= e log Q(s)}``, a finite union of closed
intervals.  The larger intersection is

    r(s) = -W_{-1}(-log Q(s) / P(s)) / log Q(s) = w_tilde(P(s)/log Q(s)) / log Q(s).

All scans run in ``y = log s`` using :class:`~stabthresh.polycore.LogForm`,
so the terminal half-line can be followed far past the range of doubles.

On the upper branch ``r log Q >= 1`` and

    sign(dr/ds) = sign( s P'/P - r * s Q'/Q ),

which is the scale-free form of ``P'Q - r P Q'`` used for critical points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import DomainError, InvalidBaseError, NotDefinedError
from .lambert import WBranch, lambert_w, w_tilde_from_log
from .polycore import LogForm, UniPoly, uni_eval

# r(s) is accepted at points where log(P / log Q) >= 1 - DOMAIN_SLACK
DOMAIN_SLACK = 1e-9
# |s P'/P - r s Q'/Q| below this is rounding noise; r is flat to working precision
G_NOISE = 1e-12


@dataclass(frozen=True)
class CurveConfig:
    domain_grid: int = 4096
    critical_grid: int = 1024
    far_grid: int = 256
    # terminal half-lines are scanned for critical points up to log s = far_log_horizon
    far_log_horizon: float = 1e4
    horizon: float = 1e6
    root_tol: float = 1e-12


DEFAULT_CONFIG = CurveConfig()


class PointKind(enum.Enum):
    ENDPOINT = "endpoint"
    CRITICAL = "critical"
    LIMIT = "limit"


@dataclass(frozen=True)
class CurvePoint:
    s: float
    r: float
    kind: PointKind
    is_local_max: bool | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "s": None if math.isinf(self.s) else self.s, "r": self.r}
        if self.is_local_max is not None:
            out["is_local_max"] = self.is_local_max
        return out


@dataclass(frozen=True)
class DomainDecomposition:
    """Closed intervals ``[lo, hi]`` (``hi = inf`` for the terminal half-line)."""

    intervals: tuple[tuple[float, float], ...]
    epsilon: float

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def has_terminal(self) -> bool:
        return bool(self.intervals) and math.isinf(self.intervals[-1][1])

    def endpoints(self) -> list[float]:
        out = []
        for lo, hi in self.intervals:
            out.append(lo)
            if not math.isinf(hi):
                out.append(hi)
        return out

    def contains(self, s: float) -> bool:
        return any(lo <= s <= hi for lo, hi in self.intervals)

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "intervals": [[lo, None if math.isinf(hi) else hi] for lo, hi in self.intervals],
        }


@dataclass(frozen=True)
class CurveLimit:
    value: Fraction
    note: str = field(default="")


class _Curve:
    """Log-domain evaluators shared by the operations below."""

    def __init__(self, P: UniPoly, Q: UniPoly):
        if not (P.is_nonnegative() and Q.is_nonnegative()):
            raise DomainError("P and Q must have nonnegative coefficients")
        self.P, self.Q = P, Q
        self.lP, self.lQ = LogForm(P), LogForm(Q)

    def h(self, y):
        """log P - log(e log Q); nonnegative exactly on the domain."""
        lq = self.lQ.value(y)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.lP.value(y) - np.log(lq) - 1.0

    def r(self, y: float) -> float:
        lp = float(self.lP.value(y))
        lq = float(self.lQ.value(y))
        if not lq > 0.0:
            raise InvalidBaseError(f"Q(s) <= 1 at s = e^{y!r}", y)
        a = lp - math.log(lq)
        if not a >= 1.0 - DOMAIN_SLACK:
            raise NotDefinedError(
                f"r(s) is not defined at s = e^{y!r}: the line and exponential do not intersect", y
            )
        return w_tilde_from_log(max(a, 1.0)) / lq

    def g(self, y: float) -> float:
        """Sign of dr/ds: s P'/P - r(s) s Q'/Q."""
        return float(self.lP.elasticity(y)) - self.r(y) * float(self.lQ.elasticity(y))


def _check_base(P: UniPoly, Q: UniPoly, eps: float) -> None:
    if not eps > 0:
        raise DomainError(f"epsilon must be positive (got {eps!r})", eps, 0.0)
    if not uni_eval(Q, eps) > 1.0:
        raise InvalidBaseError(f"Q(eps) = {uni_eval(Q, eps)!r} must exceed 1", eps)


def _tail_log(c: _Curve, y0: float) -> float:
    """A log s beyond which h keeps a constant sign."""
    P, Q = c.P, c.Q
    dP, dQ = P.degree, Q.degree
    if dP >= 1:
        # P(s) >= a s^d and log Q(s) <= log Q(1) + dQ log s for s >= 1
        log_a = math.log(P.leading())
        lq1 = math.log(float(uni_eval(Q, 1.0)))
        y = max(0.0, y0)
        if dQ > 0:
            y = max(y, (math.log(math.e * dQ) - log_a - math.log(dP)) / dP)
        for _ in range(200):
            rhs = math.e * (lq1 + dQ * y)
            if rhs <= 0 or log_a + dP * y > math.log(rhs):
                return y
            y = 2.0 * y + 1.0
        raise RuntimeError("tail bound search did not terminate")
    if dQ <= 0:
        return y0
    y = max(y0, 0.0)
    for _ in range(200):
        if float(c.h(y)) < 0:
            return y
        y = 2.0 * y + 1.0
    raise RuntimeError("tail bound search did not terminate")


def _bisect(f, lo: float, hi: float, f_lo: float, ytol: float) -> tuple[float, float]:
    """Shrink a sign-change bracket in y; returns the final (lo, hi)."""
    pos_lo = f_lo >= 0
    for _ in range(400):
        if hi - lo <= ytol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if (f(mid) >= 0) == pos_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _ytol(y: float, tol: float) -> float:
    # |ds| <= tol (1 + s)  <=>  dy <= tol (1 + s) / s
    s = math.exp(min(y, 700.0))
    return 0.5 * tol * (1.0 + s) / s


def curve_domain(P: UniPoly, Q: UniPoly, eps: float, config: CurveConfig = DEFAULT_CONFIG) -> DomainDecomposition:
    """Maximal intervals of ``{s >= eps : P(s) >= e log Q(s)}``.

    Zeros of ``P - e log Q`` are bracketed on a geometric grid of
    ``config.domain_grid`` points up to ``max(10, S_tail)``, where beyond
    ``S_tail`` the sign is fixed by a leading-term comparison, and refined by
    bisection.  A zero where the difference touches 0 without changing sign
    is not reported.
    """
    eps = float(eps)
    _check_base(P, Q, eps)
    if P.is_zero():
        return DomainDecomposition((), eps)
    c = _Curve(P, Q)
    y0 = math.log(eps)
    y_top = max(_tail_log(c, y0), math.log(10.0), y0 + 1e-9)
    ys = np.linspace(y0, y_top, config.domain_grid)
    hs = c.h(ys)
    hf = lambda y: float(c.h(y))  # noqa: E731

    inside = hs[0] >= 0
    start = y0 if inside else None
    intervals = []
    for i in range(len(ys) - 1):
        a, b = hs[i] >= 0, hs[i + 1] >= 0
        if a == b:
            continue
        lo, hi = _bisect(hf, ys[i], ys[i + 1], hs[i], _ytol(ys[i + 1], config.root_tol))
        if b:  # entering the domain: keep the side where h >= 0
            start = hi
        else:
            intervals.append((math.exp(start), math.exp(lo)))
            start = None
    if start is not None:
        intervals.append((math.exp(start), math.inf))
    return DomainDecomposition(tuple(intervals), eps)


def curve_value(P: UniPoly, Q: UniPoly, s: float) -> float:
    """Largest ``r`` with ``r P(s) = Q(s)**r``.

    Raises
    ------
    NotDefinedError
        ``P(s) < e log Q(s)``: the line misses the exponential.
    InvalidBaseError
        ``Q(s) <= 1``.
    """
    s = float(s)
    if not s > 0:
        raise DomainError("s must be positive", s, 0.0)
    if P.is_zero():
        raise NotDefinedError("r(s) is not defined for P = 0", s)
    return _Curve(P, Q).r(math.log(s))


def curve_value_log(P: UniPoly, Q: UniPoly, log_s: float) -> float:
    """:func:`curve_value` at ``s = exp(log_s)``, for s beyond float range."""
    return _Curve(P, Q).r(float(log_s))


def curve_lower_root(P: UniPoly, Q: UniPoly, s: float) -> float:
    """Smaller intersection ``-W_0(-log Q/P) / log Q`` (principal branch)."""
    c = _Curve(P, Q)
    y = math.log(float(s))
    lp, lq = float(c.lP.value(y)), float(c.lQ.value(y))
    a = lp - math.log(lq)
    if a < 1.0 - DOMAIN_SLACK:
        raise NotDefinedError("r(s) is not defined here", s)
    if a > 700.0:
        return math.exp(-lp)
    return -lambert_w(WBranch.PRINCIPAL, max(-math.exp(-a), -math.exp(-1.0))) / lq


def _scan_grid(lo_y: float, hi_y: float, config: CurveConfig) -> np.ndarray:
    if math.isinf(hi_y):
        near_top = max(math.log(config.horizon), lo_y + math.log(10.0))
        near = np.linspace(lo_y, near_top, config.critical_grid)
        far_top = max(config.far_log_horizon, 2.0 * near_top)
        if near_top <= 0:
            return near
        far = np.geomspace(near_top, far_top, config.far_grid)[1:]
        return np.concatenate([near, far])
    return np.linspace(lo_y, hi_y, config.critical_grid)


def curve_critical_points(
    P: UniPoly, Q: UniPoly, dom: DomainDecomposition, config: CurveConfig = DEFAULT_CONFIG
) -> list[CurvePoint]:
    """Interior zeros of ``P'Q - r P Q'`` on every domain interval.

    Each zero is refined until ``|ds| <= root_tol * (1 + s)``.  Local maxima
    (derivative changing from + to -) are flagged.  Sign changes are read
    only between grid points where the derivative clears ``G_NOISE``, so
    stretches where r is flat to double precision yield no points.
    """
    if dom.is_empty:
        return []
    c = _Curve(P, Q)
    out: list[CurvePoint] = []
    for lo, hi in dom.intervals:
        lo_y = math.log(lo)
        hi_y = math.inf if math.isinf(hi) else math.log(hi)
        if hi_y - lo_y <= 0:
            continue
        ys = _scan_grid(lo_y, hi_y, config)
        gs = np.array([c.g(y) for y in ys])
        signed = [i for i in range(len(ys)) if abs(gs[i]) > G_NOISE]
        for i, j in zip(signed, signed[1:]):
            if gs[i] * gs[j] > 0:
                continue
            a, b = _bisect(c.g, ys[i], ys[j], gs[i], _ytol(ys[j], config.root_tol))
            y_c = 0.5 * (a + b)
            s_c = math.exp(y_c) if y_c < 709.0 else math.inf
            out.append(CurvePoint(s_c, c.r(y_c), PointKind.CRITICAL, bool(gs[i] > 0)))
    return out


def curve_limit(P: UniPoly, Q: UniPoly) -> CurveLimit:
    """``lim r(s)`` as ``s -> inf``: ``deg P / deg Q``.

    From ``log r + log P = r log Q`` with ``log P ~ deg P log s`` and
    ``log Q ~ deg Q log s``: ``r = (log r + log P) / log Q -> deg P / deg Q``
    with an ``O(1 / log s)`` error, so convergence is slow.
    """
    if P.is_zero():
        return CurveLimit(Fraction(0), "P = 0: the curve is empty")
    if Q.degree < 1:
        raise DomainError("the limit needs deg Q >= 1")
    return CurveLimit(
        Fraction(P.degree, Q.degree),
        "r = (log r + log P)/log Q; leading powers give deg P/deg Q, error O(1/log s)",
    )


def curve_samples(
    P: UniPoly,
    Q: UniPoly,
    dom: DomainDecomposition,
    count: int,
    horizon: float = DEFAULT_CONFIG.horizon,
) -> list[tuple[float, float]]:
    """``count`` samples ``(s, r(s))`` per domain interval.

    Finite intervals are sampled evenly; the terminal half-line is sampled
    log-uniformly from its left end to ``horizon``.
    """
    if count < 2:
        raise ValueError("count must be at least 2")
    c = _Curve(P, Q)
    out: list[tuple[float, float]] = []
    for lo, hi in dom.intervals:
        if math.isinf(hi):
            top = horizon if horizon > lo else 10.0 * lo
            ss = np.geomspace(lo, top, count)
        else:
            ss = np.linspace(lo, hi, count)
        ss[0], ss[-1] = lo, (ss[-1] if math.isinf(hi) else hi)
        out.extend((float(s), c.r(math.log(s))) for s in ss)
    return out


def write_samples_csv(samples: Iterable[tuple[float, float]], stream: TextIO) -> None:
    stream.write("s,r\n")
    for s, r in samples:
        stream.write(f"{s:.17g},{r:.17g}\n")


def read_samples_csv(lines: Sequence[str]) -> list[tuple[float, float]]:
    rows = [ln.strip() for ln in lines if ln.strip()]
    if not rows or rows[0] != "s,r":
        raise ValueError("missing 's,r' header")
    return [tuple(float(x) for x in row.split(",")) for row in rows[1:]]
