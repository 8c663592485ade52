"""Thresholds for trivariate (mixed Hodge) polynomial pairs on cubes.

For ``q Pm(t,u,v) < Qm(t,u,v)**q`` there are three tools:

* :func:`mh_verify` samples a finite cube on a geometric grid.  A pass is a
  heuristic verdict; a failure comes with an exact witness.
* :func:`mh_reduce` bounds the threshold on the infinite cube through a
  substitution ``s = phi(t,u,v)`` with ``Pm <= P~(phi)``, ``Q~(phi) <= Qm``
  and ``phi >= eta``.  Then ``q P~ < Q~**q`` on ``s >= eta`` transfers to the
  cube, so the univariate threshold of ``(P~, Q~)`` is an upper bound.  The
  three dominance conditions are certified by shifted nonnegativity.
* :func:`mh_nonexistence_witness` looks for points where the inequality
  fails for a given ``q``, to show a threshold does not exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .catalog import (
    ArrangementComplement,
    ComplexProjective,
    EvenSphere,
    OddSphere,
    PuncturedAffine,
    SpaceExpr,
    ToricQuotient,
    mh_pi_poly,
    mh_poly,
)
from .errors import DomainError, InvalidBaseError, ReductionInvalidError
from .oracle import snap_rational, compare_power
from .polycore import (
    EvalMode,
    TriPoly,
    UniPoly,
    as_fraction,
    format_poly,
    shifted_nonneg_certificate,
    tri_compose_uni,
    tri_eval,
)
from .threshold import ThresholdResult, integer_holds, real_threshold

DEFAULT_GRID_PER_AXIS = 64
MARGIN = 1e-9


@dataclass(frozen=True)
class CubeRegion:
    """``[lo, hi]**3``; ``hi`` may be ``inf``."""

    lo: float
    hi: float = math.inf

    def __post_init__(self):
        if not (0 < self.lo <= self.hi):
            raise DomainError(f"need 0 < lo <= hi (got {self.lo!r}, {self.hi!r})", (self.lo, self.hi))

    @property
    def finite(self) -> bool:
        return not math.isinf(self.hi)

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": None if math.isinf(self.hi) else self.hi}


@dataclass(frozen=True)
class Reduction:
    phi: TriPoly
    p_tilde: UniPoly
    q_tilde: UniPoly
    eta: Fraction

    def to_json(self) -> dict:
        return {
            "phi": format_poly(self.phi),
            "p_tilde": format_poly(self.p_tilde),
            "q_tilde": format_poly(self.q_tilde),
            "eta": str(self.eta),
        }


@dataclass(frozen=True)
class MHViolation:
    q: float
    t: float
    u: float
    v: float
    lhs: float
    rhs: float
    equality: bool = False

    def to_json(self) -> dict:
        return {"q": self.q, "t": self.t, "u": self.u, "v": self.v, "lhs": self.lhs, "rhs": self.rhs, "equality": self.equality}


@dataclass(frozen=True)
class MHHoldsBySampling:
    """Every grid point passed; no mesh or tail certificate, hence heuristic."""

    q: float
    cube: CubeRegion
    points: int
    heuristic: bool = True

    def __bool__(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"holds_by_sampling": True, "heuristic": True, "q": self.q, "cube": self.cube.to_json(), "points": self.points}


# ----------------------------------------------------------- log evaluation


class _LogTri:
    """``log p(e^a, e^b, e^c)`` for a nonnegative trivariate polynomial."""

    def __init__(self, p: TriPoly):
        items = sorted(p.items())
        if not items:
            self.exps = np.zeros((0, 3))
            self.logc = np.zeros(0)
        else:
            self.exps = np.array([e for e, _ in items], dtype=float)
            self.logc = np.log(np.array([float(c) for _, c in items]))

    def __call__(self, a, b, c):
        if len(self.logc) == 0:
            return np.full(np.broadcast(a, b, c).shape, -np.inf)
        terms = [
            lc + ea * a + eb * b + ec * c for lc, (ea, eb, ec) in zip(self.logc, self.exps)
        ]
        stack = np.stack(terms)
        top = stack.max(axis=0)
        return top + np.log(np.exp(stack - top).sum(axis=0))


def _exact_triple(Pm: TriPoly, Qm: TriPoly, q: float, t: float, u: float, v: float) -> MHViolation | None:
    qf, tf, uf, vf = snap_rational(q), snap_rational(t), snap_rational(u), snap_rational(v)
    pv = tri_eval(Pm, tf, uf, vf, EvalMode.EXACT)
    qv = tri_eval(Qm, tf, uf, vf, EvalMode.EXACT)
    sign = compare_power(pv, qv, qf)
    if sign is None or sign < 0:
        return None
    lhs = float(qf) * float(pv) if pv < 2 ** 1000 else math.inf
    try:
        rhs = math.exp(float(qf) * math.log(float(qv)))
    except OverflowError:
        rhs = math.inf
    return MHViolation(float(qf), float(tf), float(uf), float(vf), lhs, rhs, sign == 0)


def _check_base(Qm: TriPoly, lo: float) -> None:
    lo_f = as_fraction(lo)
    if not tri_eval(Qm, lo_f, lo_f, lo_f, EvalMode.EXACT) > 1:
        raise InvalidBaseError("Qm must exceed 1 at the low corner of the cube", lo)
    if not Qm.is_nonnegative():
        raise DomainError("Qm must have nonnegative coefficients")


def _scan(Pm, Qm, q, axes) -> MHViolation | None:
    """Lexicographically smallest exact witness on the product grid."""
    lt, lu, lv = np.meshgrid(*(np.log(a) for a in axes), indexing="ij")
    A = _LogTri(Pm)(lt, lu, lv)
    lnQ = _LogTri(Qm)(lt, lu, lv)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = q * lnQ - math.log(q) - A
    scale = np.maximum(1.0, np.abs(A))
    for flat in np.flatnonzero(h <= MARGIN * scale):
        i, j, k = np.unravel_index(flat, h.shape)
        v = _exact_triple(Pm, Qm, q, axes[0][i], axes[1][j], axes[2][k])
        if v is not None:
            return v
    return None


def mh_verify(
    Pm: TriPoly, Qm: TriPoly, q: float, cube: CubeRegion, grid_per_axis: int = DEFAULT_GRID_PER_AXIS
) -> MHHoldsBySampling | MHViolation:
    """Sample ``q Pm < Qm**q`` on a geometric grid over a finite cube.

    Returns the lexicographically smallest ``(t, u, v)`` grid witness after
    exact re-verification, or a heuristic pass.

    Raises
    ------
    DomainError
        Infinite cube; use :func:`mh_reduce` for that case.
    """
    if not cube.finite:
        raise DomainError("mh_verify needs a finite cube; use mh_reduce for [lo, inf)^3", cube.hi)
    if not q > 0:
        raise DomainError("q must be positive", q, 0.0)
    _check_base(Qm, cube.lo)
    axis = np.geomspace(cube.lo, cube.hi, grid_per_axis) if cube.hi > cube.lo else np.array([cube.lo])
    axis[0] = cube.lo
    v = _scan(Pm, Qm, float(q), (axis, axis, axis))
    if v is not None:
        return v
    return MHHoldsBySampling(float(q), cube, len(axis) ** 3)


# --------------------------------------------------------------- reductions


@dataclass(frozen=True)
class ReductionCheck:
    p_dominated: bool
    q_dominated: bool
    phi_bounded: bool

    @property
    def ok(self) -> bool:
        return self.p_dominated and self.q_dominated and self.phi_bounded

    def first_failure(self) -> str | None:
        if not self.p_dominated:
            return "Pm <= P~(phi)"
        if not self.q_dominated:
            return "Q~(phi) <= Qm"
        if not self.phi_bounded:
            return "phi >= eta"
        return None


def certify_reduction(Pm: TriPoly, Qm: TriPoly, red: Reduction, lo: float = 1) -> ReductionCheck:
    """Shifted nonnegativity certificates for the three dominance conditions on ``[lo, inf)**3``."""
    shifts = [as_fraction(lo)] * 3
    p_gap = tri_compose_uni(red.p_tilde, red.phi) - Pm
    q_gap = Qm - tri_compose_uni(red.q_tilde, red.phi)
    phi_gap = red.phi - TriPoly.constant(red.eta)
    return ReductionCheck(
        shifted_nonneg_certificate(p_gap, shifts),
        shifted_nonneg_certificate(q_gap, shifts),
        shifted_nonneg_certificate(phi_gap, shifts),
    )


def _sampled_nonneg(p: TriPoly, lo: float, points: int = 24, hi: float = 1e4) -> bool:
    axis = np.geomspace(lo, max(hi, 10 * lo), points)
    for t in axis:
        for u in axis:
            for v in axis:
                if tri_eval(p, t, u, v) < 0:
                    return False
    return True


@dataclass(frozen=True)
class ReductionBound:
    """``value`` bounds the real threshold on ``[lo, inf)**3`` from above."""

    value: float
    certified: bool
    reduced: ThresholdResult
    reduction: Reduction
    lo: float

    def to_json(self) -> dict:
        return {
            "upper_bound": self.value,
            "certified": self.certified,
            "label": "certified upper bound" if self.certified else "uncertified (sampled dominance)",
            "reduction": self.reduction.to_json(),
            "reduced_threshold": self.reduced.to_json(),
            "cube": {"lo": self.lo, "hi": None},
        }


def mh_reduce(
    Pm: TriPoly,
    Qm: TriPoly,
    red: Reduction,
    lo: float = 1,
    allow_uncertified: bool = False,
    certify_bracket: bool = False,
) -> ReductionBound:
    """Upper bound on the infinite-cube threshold from a reduction.

    Raises
    ------
    ReductionInvalidError
        A dominance certificate fails (``failing`` names it), unless
        ``allow_uncertified`` is set and dense sampling finds no
        counterexample, in which case the bound is labelled uncertified.
    """
    check = certify_reduction(Pm, Qm, red, lo)
    certified = check.ok
    if not certified:
        failing = check.first_failure()
        if not allow_uncertified:
            raise ReductionInvalidError(f"reduction certificate failed: {failing}", failing)
        gaps = {
            "Pm <= P~(phi)": tri_compose_uni(red.p_tilde, red.phi) - Pm,
            "Q~(phi) <= Qm": Qm - tri_compose_uni(red.q_tilde, red.phi),
            "phi >= eta": red.phi - TriPoly.constant(red.eta),
        }
        for name, gap in gaps.items():
            if not _sampled_nonneg(gap, float(lo)):
                raise ReductionInvalidError(f"sampling refutes {name}", name)
    res = real_threshold(red.p_tilde, red.q_tilde, float(red.eta), certify=certify_bracket)
    return ReductionBound(res.value, certified, res, red, float(lo))


def default_reduction(x: SpaceExpr, lo: float = 1) -> Reduction:
    """The standard substitution for spaces whose mixed Hodge data admit one.

    Projective spaces and toric quotients use ``phi = t^2 uv`` with
    ``P~ = sum(s + s^(n_i+1))`` and ``Q~ = prod(1 + s + ... + s^(n_i))``.
    Punctured affine spaces, odd spheres and arrangement complements use
    ``phi = MH_pi`` with ``P~ = s``, ``Q~ = 1 + s``.
    """
    lo_f = as_fraction(lo)
    s = UniPoly.monomial(1)
    if isinstance(x, EvenSphere) and x.n == 1:
        x = ComplexProjective(1)
    if isinstance(x, (ComplexProjective, ToricQuotient)):
        ns = (x.n,) if isinstance(x, ComplexProjective) else x.ns
        phi = TriPoly.monomial(2, 1, 1)
        p_t = None
        q_t = None
        for k in ns:
            p_t = (s + UniPoly.monomial(k + 1)) if p_t is None else p_t + s + UniPoly.monomial(k + 1)
            g = UniPoly.from_terms({i: 1 for i in range(k + 1)})
            q_t = g if q_t is None else q_t * g
        return Reduction(phi, p_t, q_t, lo_f ** 4)
    if isinstance(x, (OddSphere, PuncturedAffine, ArrangementComplement)):
        phi = mh_pi_poly(x)
        eta = tri_eval(phi, lo_f, lo_f, lo_f, EvalMode.EXACT)
        return Reduction(phi, s, 1 + s, eta)
    raise ReductionInvalidError(f"no standard reduction for {x}", "phi")


# ------------------------------------------------------------ integer verdict


@dataclass(frozen=True)
class MHIntegerVerdict:
    """Integer threshold on ``[lo, inf)**3``.

    ``upper`` is the integer threshold of the reduced pair.  ``exact`` is
    true when ``upper - 1`` is refuted by a witness (or ``upper == 1``).
    """

    upper: int
    exact: bool
    witness: MHViolation | None
    bound: ReductionBound

    @property
    def value(self) -> int | None:
        return self.upper if self.exact else None

    def to_json(self) -> dict:
        return {
            "upper": self.upper,
            "exact": self.exact,
            "value": self.value,
            "witness": None if self.witness is None else self.witness.to_json(),
            "reduction": self.bound.to_json(),
        }


def mh_integer_threshold(
    Pm: TriPoly,
    Qm: TriPoly,
    red: Reduction,
    lo: float = 1,
    search_hi: float = 100.0,
    grid_per_axis: int = 32,
) -> MHIntegerVerdict:
    """Integer threshold via a certified reduction plus a finite-cube refutation."""
    bound = mh_reduce(Pm, Qm, red, lo)
    n_r = bound.reduced.integer_value
    if not integer_holds(red.p_tilde, red.q_tilde, n_r, red.eta):
        raise RuntimeError("reduced integer threshold failed exact re-check")
    if n_r == 1:
        return MHIntegerVerdict(1, True, None, bound)
    res = mh_verify(Pm, Qm, n_r - 1, CubeRegion(lo, search_hi), grid_per_axis)
    if isinstance(res, MHViolation):
        return MHIntegerVerdict(n_r, True, res, bound)
    w = mh_nonexistence_witness(Pm, Qm, n_r - 1, lo)
    return MHIntegerVerdict(n_r, w is not None, w, bound)


def mh_space_integer_threshold(x: SpaceExpr, lo: float = 1) -> MHIntegerVerdict:
    return mh_integer_threshold(mh_pi_poly(x), mh_poly(x), default_reduction(x, lo), lo)


# ---------------------------------------------------------- non-existence


def _match_p1(Pm: TriPoly, Qm: TriPoly) -> int | None:
    """n when ``Pm = t^2 uv + t^(2n+3) (uv)^(n+1)`` and ``Qm`` is the projective-space MH."""
    terms = Pm.terms
    if len(terms) != 2 or (2, 1, 1) not in terms or terms[(2, 1, 1)] != 1:
        return None
    (a, b, c), coeff = next((e, k) for e, k in terms.items() if e != (2, 1, 1))
    if coeff != 1 or b != c or a != 2 * b + 1 or b < 2:
        return None
    n = b - 1
    expected = {(2 * i, i, i): Fraction(1) for i in range(n + 1)}
    return n if Qm.terms == expected else None


def _p1_construction(Pm, Qm, n: int, q: float, lo: float) -> MHViolation | None:
    """Pick ``s0``, take ``t`` past the bound from the definition, set ``uv = s0 / t^2``.

    With ``s = t^2 uv`` fixed at ``s0``, ``Pm = s0 + t s0^(n+1)`` grows
    linearly in ``t`` while ``Qm`` stays at ``1 + s0 + ... + s0^n``.  The
    point is admissible only when ``u = v = sqrt(s0) / t >= lo``.
    """
    for s0 in np.geomspace(1e-3, 1e12, 301):
        qs = sum(s0 ** i for i in range(n + 1))
        with np.errstate(over="ignore"):
            t0 = (qs ** q - q * s0) / (q * s0 ** (n + 1))
        if not np.isfinite(t0):
            continue
        t = max(lo, t0 * (1 + 1e-6) + 1e-9)
        w = math.sqrt(s0) / t
        if w < lo:
            continue
        v = _exact_triple(Pm, Qm, q, t, w, w)
        if v is not None:
            return v
    return None


def mh_nonexistence_witness(
    Pm: TriPoly, Qm: TriPoly, q: float, lo: float, budget: int = 40
) -> MHViolation | None:
    """A point of ``[lo, inf)**3`` with ``q Pm >= Qm**q``, or None (inconclusive).

    Tries the explicit construction for the modified projective-space pair
    first, then a geometric search over ``[lo, lo * 10**12]**3`` with
    ``budget`` points per axis.  Returned witnesses are verified exactly.
    """
    if not (q > 0 and lo > 0):
        raise DomainError("need q > 0 and lo > 0", (q, lo))
    _check_base(Qm, lo)
    n = _match_p1(Pm, Qm)
    if n is not None:
        v = _p1_construction(Pm, Qm, n, float(q), float(lo))
        if v is not None:
            return v
    axis = np.geomspace(lo, lo * 1e12, budget)
    return _scan(Pm, Qm, float(q), (axis, axis, axis))


def p1_example(n: int) -> tuple[TriPoly, TriPoly]:
    """``(t^2 uv + t^(2n+3) (uv)^(n+1), MH(CP^n))``, the pair with no threshold on the full quadrant."""
    P = TriPoly.monomial(2, 1, 1) + TriPoly.monomial(2 * n + 3, n + 1, n + 1)
    Q = TriPoly.constant(0)
    for i in range(n + 1):
        Q = Q + TriPoly.monomial(2 * i, i, i)
    return P, Q
