"""Real Lambert W on both branches and the inverse of ``w -> e**w / w``.

Halley iteration on ``w*e**w - z`` with the usual starting values: the
branch-point series in ``p = sqrt(2*(e*z + 1))``, Winitzki's approximation on
the principal branch, and ``L1 - L2 + L2/L1`` asymptotics near 0 and
infinity.  For MinusOne arguments so small that ``e**w`` underflows, the
iteration switches to the equivalent equation ``x - log x = -log(-z)`` with
``w = -x``.
"""

from __future__ import annotations

import enum
import math

from .errors import DomainError

E = math.e
INV_E = math.exp(-1.0)

MAX_ITER = 60
# -1 is returned exactly inside this radius; it keeps |w e^w - z| <= 1e-12 |z|
BRANCH_SNAP = 1e-13


class WBranch(enum.IntEnum):
    PRINCIPAL = 0
    MINUS_ONE = -1

    @classmethod
    def parse(cls, value) -> "WBranch":
        if isinstance(value, WBranch):
            return value
        if str(value).strip().lower() in ("0", "principal", "w0"):
            return cls.PRINCIPAL
        if str(value).strip().lower() in ("-1", "minusone", "minus_one", "w-1"):
            return cls.MINUS_ONE
        raise ValueError(f"unknown branch {value!r}")


def _branch_series(z: float, sign: float) -> float:
    p = sign * math.sqrt(max(2.0 * (E * z + 1.0), 0.0))
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3


def _halley(z: float, w: float) -> float:
    for _ in range(MAX_ITER):
        ew = math.exp(w)
        f = w * ew - z
        if f == 0.0:
            return w
        wp1 = w + 1.0
        if wp1 == 0.0:
            return w
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) < 1e-15 * (1.0 + abs(w)):
            break
    return w


def _solve_x_minus_log_x(a: float, x: float) -> float:
    """Largest root of ``x - log(x) = a`` (a >= 1) by Halley from ``x``."""
    for _ in range(MAX_ITER):
        f = x - math.log(x) - a
        fp = 1.0 - 1.0 / x
        if fp == 0.0:
            break
        fpp = 1.0 / (x * x)
        step = f / (fp - f * fpp / (2.0 * fp))
        x_new = x - step
        if x_new <= 1.0:
            x_new = 0.5 * (x + 1.0)
        x, step = x_new, x - x_new
        if abs(step) < 1e-15 * (1.0 + abs(x)):
            break
    return x


def lambert_w(branch, z: float) -> float:
    """Real Lambert W: the ``w`` with ``w * exp(w) == z`` on the given branch.

    Parameters
    ----------
    branch : WBranch or {0, -1}
        ``PRINCIPAL`` (w >= -1, z >= -1/e) or ``MINUS_ONE`` (w <= -1,
        -1/e <= z < 0).
    z : float

    Raises
    ------
    DomainError
        ``z`` outside the branch domain; ``.endpoint`` is the nearest
        admissible argument.
    """
    branch = WBranch.parse(branch)
    z = float(z)
    if math.isnan(z):
        raise DomainError("W(nan) is undefined", z, None)
    if z < -INV_E:
        raise DomainError(f"z = {z!r} is below the branch point -1/e", z, -INV_E)
    if abs(z + INV_E) <= BRANCH_SNAP:
        return -1.0

    if branch is WBranch.PRINCIPAL:
        if z == 0.0:
            return 0.0
        if math.isinf(z):
            return math.inf
        if z < -0.25:
            w = _branch_series(z, 1.0)
        elif z < 3.0:
            lz = math.log1p(z)
            w = lz * (1.0 - math.log1p(lz) / (2.0 + lz))
        else:
            l1 = math.log(z)
            l2 = math.log(l1)
            w = l1 - l2 + l2 / l1
        return _halley(z, w)

    if z >= 0.0:
        raise DomainError(f"z = {z!r} is not in [-1/e, 0) for the -1 branch", z, -0.0)
    if z < -0.25:
        return _halley(z, _branch_series(z, -1.0))
    a = -math.log(-z)
    l2 = math.log(a)
    x0 = a + l2 + l2 / a
    if z > -1e-280:
        return -_solve_x_minus_log_x(a, x0)
    return _halley(z, -x0)


def w_tilde(z: float) -> float:
    """Inverse of ``w -> e**w / w`` on ``w >= 1``; equals ``-W_{-1}(-1/z)``.

    Raises
    ------
    DomainError
        ``z < e``: ``e**w / w`` has minimum ``e`` at ``w = 1``.
    """
    z = float(z)
    if not z >= E:
        raise DomainError(f"z = {z!r} < e has no preimage with w >= 1", z, E)
    arg = max(-1.0 / z, -INV_E)
    return -lambert_w(WBranch.MINUS_ONE, arg)


def w_tilde_from_log(log_z: float) -> float:
    """``w_tilde(exp(log_z))`` without forming ``exp(log_z)``.

    Uses the Lambert route while ``exp(log_z)`` is a comfortable double and
    solves ``w - log w = log_z`` directly beyond that.
    """
    log_z = float(log_z)
    if not log_z >= 1.0:
        raise DomainError(f"log z = {log_z!r} < 1", log_z, 1.0)
    if log_z < 700.0:
        return w_tilde(max(math.exp(log_z), E))
    l2 = math.log(log_z)
    return _solve_x_minus_log_x(log_z, log_z + l2 + l2 / log_z)
