import json
import math
import random

import pytest
from hypothesis import given, settings

from stabthresh.catalog import ComplexProjective, EvenSphere, OddSphere, ToricQuotient, cohomology_poincare, homotopy_poincare
from stabthresh.curve import PointKind
from stabthresh.errors import DomainError, InvalidBaseError, PreconditionError, ThresholdDoesNotExistError
from stabthresh.polycore import UniPoly, parse_uni
from stabthresh.threshold import (
    ThresholdResult,
    integer_holds,
    integer_threshold,
    lemma_shape,
    monotonicity_guard,
    product_threshold_bound,
    real_threshold,
)

from strategies import shaped_pairs


def pair(x):
    return homotopy_poincare(x), cohomology_poincare(x)


@pytest.mark.parametrize("n", [1, 4, 10])
def test_odd_sphere(n):
    res = real_threshold(*pair(OddSphere(n)), 1.0)
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert res.strict_at_value and res.attained.kind is PointKind.LIMIT
    assert res.integer_value == 1
    assert res.bracket_agrees


@pytest.mark.parametrize("n", [1, 5])
def test_even_sphere(n):
    res = real_threshold(*pair(EvenSphere(n)), 1.0)
    assert 2 < res.value <= 2.5
    assert res.integer_value == 3
    assert not res.strict_at_value


def test_projective_spaces():
    assert integer_threshold(*pair(ComplexProjective(1)), 1.0) == 3
    for n in (2, 3, 7):
        assert integer_threshold(*pair(ComplexProjective(n)), 1.0) == 2
    res = real_threshold(*pair(ComplexProjective(3)), 1.0, certify=False)
    assert res.value == pytest.approx(1.17891503, abs=1e-7)


def test_general_pair():
    P, Q = parse_uni("2t"), parse_uni("1+t^2")
    assert not lemma_shape(P, Q)
    res = real_threshold(P, Q, 1.0, certify=False)
    assert res.value == pytest.approx(2.0, abs=1e-12)
    # 2 * 2t < (1+t^2)^2 fails at t = 1, so the integer threshold is 3
    assert res.integer_value == 3 and res.integer_exceeds_ceiling


def test_integer_holds_exact():
    P, Q = parse_uni("t^2+t^3"), parse_uni("1+t^2")
    assert not integer_holds(P, Q, 2, 1)
    assert integer_holds(P, Q, 3, 1)
    with pytest.raises(DomainError):
        integer_holds(P, Q, 0, 1)


def test_input_errors():
    with pytest.raises(DomainError):
        real_threshold(parse_uni("t^2"), parse_uni("1+t^2"), 0.0)
    with pytest.raises(InvalidBaseError):
        real_threshold(parse_uni("t^2"), parse_uni("1/2+t^2"), 0.5)
    with pytest.raises(ThresholdDoesNotExistError):
        real_threshold(parse_uni("t^2"), UniPoly([2]), 1.0)


def test_vacuous_pair():
    res = real_threshold(UniPoly(), parse_uni("1+t^2"), 1.0)
    assert res.vacuous and res.value == 0 and res.integer_value == 1


def test_lemma_shape():
    assert lemma_shape(parse_uni("t^2+t^3"), parse_uni("1+t^2"))
    assert not lemma_shape(parse_uni("t^2"), parse_uni("2+t^2"))
    assert not lemma_shape(parse_uni("t^2"), parse_uni("1+t+t^2"))
    assert not lemma_shape(parse_uni("t^2"), UniPoly([1]))


def test_product_bound():
    s3 = pair(OddSphere(1))
    r = real_threshold(*s3, 1.0, certify=False)
    b = product_threshold_bound([r, r], [s3, s3], 1.0)
    assert b.bound == 1 and b.true_integer == 1 and b.true_real == pytest.approx(0.5)
    with pytest.raises(PreconditionError):
        small = (parse_uni("t^2"), parse_uni("1+1/2 t^2"))
        product_threshold_bound([r], [small], 1.0)


def test_monotonicity_guard():
    P2, Q2 = parse_uni("2t"), parse_uni("1+t^2")
    assert monotonicity_guard(P2, Q2, 1.5, 1.0)
    assert monotonicity_guard(parse_uni("t^2"), parse_uni("1+2t^2"), 1.01, 1.0)
    assert not monotonicity_guard(P2, Q2, 0.8, 1.0)


def test_json_round_trip():
    res = real_threshold(*pair(EvenSphere(1)), 1.0)
    data = json.loads(json.dumps(res.to_json()))
    back = ThresholdResult.from_json(data)
    assert back.to_json() == res.to_json()


@pytest.mark.parametrize("space", [OddSphere(2), EvenSphere(2), ComplexProjective(1), ComplexProjective(4), ToricQuotient((1, 2))], ids=str)
def test_hilali_bound(space):
    P, Q = pair(space)
    if P(1) <= Q(1):
        assert integer_threshold(P, Q, 1.0) <= 3


@settings(max_examples=40)
@given(shaped_pairs())
def test_integer_is_ceiling_on_shaped_pairs(pq):
    res = real_threshold(*pq, 1.0, certify=False)
    near = round(res.value)
    is_integer = abs(res.value - near) <= 1e-9
    snapped = near if is_integer else math.ceil(res.value)
    # an integer value attained at a finite point is an equality there, so that integer fails
    attained_integer = is_integer and not res.strict_at_value and res.value > 0
    assert res.integer_value == max(1, snapped + (1 if attained_integer else 0))


@settings(max_examples=15)
@given(shaped_pairs(max_degree=8))
def test_bracket_agreement_on_shaped_pairs(pq):
    res = real_threshold(*pq, 1.0, tol=1e-6)
    lo, hi = res.certified_bracket
    assert hi - lo <= 1e-6 + 1e-12
    assert abs(res.value - 0.5 * (lo + hi)) <= 1e-6
