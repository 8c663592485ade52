import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stabthresh.errors import DomainError
from stabthresh.lambert import WBranch, lambert_w, w_tilde, w_tilde_from_log

P, M = WBranch.PRINCIPAL, WBranch.MINUS_ONE


def test_examples():
    assert lambert_w(P, 0.0) == 0.0
    assert lambert_w(P, math.e) == pytest.approx(1.0, abs=1e-15)
    assert lambert_w(M, -1 / math.e) == -1.0
    assert w_tilde(math.e) == pytest.approx(1.0, abs=1e-12)
    assert w_tilde(math.e ** 2 / 2) == pytest.approx(2.0, abs=1e-12)


def test_w_tilde_at_ten_matches_bisection():
    # independent root: bisection of e^w/w - 10 on [1, 10]
    lo, hi = 1.0, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if math.exp(mid) / mid < 10:
            lo = mid
        else:
            hi = mid
    assert w_tilde(10.0) == pytest.approx(lo, abs=1e-12)
    assert w_tilde(10.0) == pytest.approx(3.577152063957297, abs=1e-12)


@pytest.mark.parametrize("branch,z", [(P, -0.5), (M, -0.5), (M, 0.0), (M, 1.0)])
def test_domain_errors_carry_endpoint(branch, z):
    with pytest.raises(DomainError) as info:
        lambert_w(branch, z)
    assert info.value.endpoint is not None


def test_w_tilde_below_e_is_an_error():
    with pytest.raises(DomainError):
        w_tilde(2.7)


def test_branch_names_parse():
    assert WBranch.parse("0") is P and WBranch.parse(-1) is M and WBranch.parse("minus_one") is M
    with pytest.raises(ValueError):
        WBranch.parse("2")


def test_round_trip_on_dense_samples():
    ws = np.concatenate([np.linspace(-20, -1, 5000), np.linspace(-1, 20, 5000)])
    for w in ws:
        branch = M if w < -1 else P
        got = lambert_w(branch, w * math.exp(w))
        assert abs(got - w) <= 1e-10 * max(1.0, abs(w))


def test_residual_per_branch():
    rng = np.random.default_rng(11)
    z0 = np.concatenate([-np.exp(-1) * rng.random(5000), np.exp(rng.uniform(-690, 690, 5000))])
    for z in z0:
        w = lambert_w(P, z)
        assert abs(w * math.exp(w) - z) <= 1e-12 * max(abs(z), 1e-300) + 1e-300
    z1 = -np.exp(-1) * rng.random(10000)
    z1 = z1[z1 < 0]
    for z in z1:
        w = lambert_w(M, z)
        assert abs(w * math.exp(w) - z) <= 1e-12 * max(abs(z), 1e-300)


@given(st.floats(min_value=-1 / math.e + 1e-12, max_value=-1e-300))
def test_branch_ordering(z):
    assert lambert_w(M, z) <= -1 <= lambert_w(P, z)


def test_monotonicity():
    zs = np.sort(np.random.default_rng(5).uniform(-1 / math.e, 0, 2000))
    w0 = [lambert_w(P, z) for z in zs]
    w1 = [lambert_w(M, z) for z in zs if z < 0]
    assert all(a <= b for a, b in zip(w0, w0[1:]))
    assert all(a >= b for a, b in zip(w1, w1[1:]))
    big = np.sort(np.random.default_rng(6).uniform(0, 1e6, 2000))
    wb = [lambert_w(P, z) for z in big]
    assert all(a <= b for a, b in zip(wb, wb[1:]))


@given(st.floats(min_value=math.e, max_value=1e6))
def test_w_tilde_inverts(z):
    w = w_tilde(z)
    assert w >= 1.0
    assert math.exp(w) / w == pytest.approx(z, rel=1e-9)


@given(st.floats(min_value=1.0, max_value=1e9))
def test_w_tilde_from_log(log_z):
    w = w_tilde_from_log(log_z)
    assert w >= 1.0
    # w - log w = log z
    assert w - math.log(w) == pytest.approx(log_z, rel=1e-12, abs=1e-9)
