import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stabthresh.catalog import (
    ArrangementComplement,
    ComplexProjective,
    EvenSphere,
    OddSphere,
    Product,
    PuncturedAffine,
    ToricQuotient,
    catalog_entries,
    cohomology_poincare,
    fh_check,
    fh_check_space,
    fh_data,
    format_space,
    has_mixed_hodge,
    hilali_check,
    homotopy_poincare,
    mh_pi_poly,
    mh_poly,
    parse_space,
    space_from_json,
    space_to_json,
)
from stabthresh.errors import FHInputError, MixedHodgeUnavailableError, ParseError
from stabthresh.polycore import EvalMode, TriPoly, UniPoly, parse_poly, parse_uni, tri_eval, uni_eval

from fh_mutations import seeded_mutations

ENTRIES = catalog_entries()


def test_homotopy_examples():
    assert homotopy_poincare(EvenSphere(1)) == parse_uni("t^2+t^3")
    assert homotopy_poincare(ComplexProjective(3)) == parse_uni("t^2+t^7")
    assert homotopy_poincare(Product((OddSphere(1), OddSphere(1)))) == parse_uni("2t^3")


def test_cohomology_examples():
    assert cohomology_poincare(EvenSphere(2)) == parse_uni("1+t^4")
    assert cohomology_poincare(ToricQuotient((1, 2))) == parse_uni("(1+t^2)(1+t^2+t^4)")
    assert cohomology_poincare(Product((OddSphere(1), OddSphere(1)))) == parse_uni("1+2t^3+t^6")
    assert cohomology_poincare(ArrangementComplement((1, 2))) == parse_uni("(1+t^3)(1+t^5)")


def test_mixed_hodge_examples():
    for n in (1, 2, 4):
        assert mh_poly(PuncturedAffine(n)) == TriPoly.constant(1) + TriPoly.monomial(2 * n + 1, n + 1, n + 1)
        assert mh_pi_poly(PuncturedAffine(n)) == TriPoly.monomial(2 * n + 1, n + 1, n + 1)
    assert mh_pi_poly(ComplexProjective(2)) == parse_poly("t^2 u v + t^5 u^3 v^3")
    assert mh_pi_poly(ToricQuotient((2, 2))) == parse_poly("2t^2 u v + 2t^5 u^3 v^3")


def test_mixed_hodge_unavailable():
    with pytest.raises(MixedHodgeUnavailableError):
        mh_poly(EvenSphere(2))
    assert not has_mixed_hodge(EvenSphere(3))
    assert has_mixed_hodge(EvenSphere(1))


@pytest.mark.parametrize("x", ENTRIES, ids=str)
def test_specialization(x):
    if not has_mixed_hodge(x):
        return
    t = parse_uni("t")
    for s in (0, 1, 2, 3):
        assert tri_eval(mh_poly(x), s, 1, 1, EvalMode.EXACT) == uni_eval(cohomology_poincare(x), s, EvalMode.EXACT)
        assert tri_eval(mh_pi_poly(x), s, 1, 1, EvalMode.EXACT) == uni_eval(homotopy_poincare(x), s, EvalMode.EXACT)


@pytest.mark.parametrize("x", ENTRIES, ids=str)
def test_euler_relation(x):
    chi = uni_eval(cohomology_poincare(x), -1, EvalMode.EXACT)
    chi_pi = uni_eval(homotopy_poincare(x), -1, EvalMode.EXACT)
    assert chi >= 0 and chi_pi <= 0 and chi_pi < chi


def test_cp1_is_s2():
    a, b = ComplexProjective(1), EvenSphere(1)
    assert homotopy_poincare(a) == homotopy_poincare(b)
    assert cohomology_poincare(a) == cohomology_poincare(b)
    assert mh_poly(a) == mh_poly(b) and mh_pi_poly(a) == mh_pi_poly(b)


@given(st.lists(st.integers(1, 4), min_size=1, max_size=3))
def test_toric_coincides_with_projective_product(ns):
    tor = ToricQuotient(tuple(ns))
    prod = Product(tuple(ComplexProjective(n) for n in ns))
    assert homotopy_poincare(tor) == homotopy_poincare(prod)
    assert cohomology_poincare(tor) == cohomology_poincare(prod)
    assert mh_poly(tor) == mh_poly(prod)
    assert mh_pi_poly(tor) == mh_pi_poly(prod)


@pytest.mark.parametrize("x", ENTRIES, ids=str)
def test_catalog_passes_checks(x):
    rep = fh_check_space(x)
    assert rep.passed, rep.failures()
    assert hilali_check(x).passed


def test_fh_examples():
    assert fh_check([3], [], [1, 0, 0, 1]).passed
    bad = fh_check([3], [], [1, 0, 0, 0, 1])
    assert not bad.passed and {"b", "e"} <= set(bad.failures())
    assert fh_check([3], [2], [1, 0, 1]).passed


@pytest.mark.parametrize("odd,even,betti", [([2], [], [1]), ([3], [3], [1, 0, 0, 1]), ([3], [], [0, 0, 0, 1]), ([3], [], [1, -1, 0, 1])])
def test_fh_input_errors(odd, even, betti):
    with pytest.raises(FHInputError):
        fh_check(odd, even, betti)


@pytest.mark.parametrize("x,label,mutated", seeded_mutations(), ids=lambda v: v if isinstance(v, str) else None)
def test_mutations_fail(x, label, mutated):
    rep = fh_check(mutated.odd_degrees, mutated.even_degrees, mutated.betti)
    assert not rep.passed, f"{x}: {label}"


@pytest.mark.parametrize("x", ENTRIES, ids=str)
def test_round_trips(x):
    assert parse_space(format_space(x)) == x
    assert space_from_json(json.dumps(space_to_json(x))) == x


def test_aliases_and_errors():
    assert parse_space("S3") == OddSphere(1)
    assert parse_space("S4") == EvenSphere(2)
    assert parse_space("CP2") == ComplexProjective(2)
    assert parse_space("product(S3, cp(2))") == Product((OddSphere(1), ComplexProjective(2)))
    with pytest.raises(ParseError) as info:
        parse_space("cp(2")
    assert info.value.position == 4
    with pytest.raises(ParseError):
        parse_space("S1")
    with pytest.raises(ParseError):
        parse_space("lens(3)")


def test_fh_data():
    d = fh_data(ComplexProjective(2))
    assert d.odd_degrees == (5,) and d.even_degrees == (2,) and d.betti == (1, 0, 1, 0, 1)
