"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from stabthresh.polycore import TriPoly, UniPoly

small_rat = st.fractions(min_value=-5, max_value=5, max_denominator=7)
nonneg_rat = st.fractions(min_value=0, max_value=5, max_denominator=7)


@st.composite
def unipolys(draw, max_degree=5, coeffs=small_rat):
    return UniPoly(draw(st.lists(coeffs, max_size=max_degree + 1)))


@st.composite
def tripolys(draw, max_exp=3, max_terms=4, coeffs=small_rat):
    keys = st.tuples(*[st.integers(0, max_exp)] * 3)
    terms = draw(st.dictionaries(keys, coeffs, max_size=max_terms))
    return TriPoly(terms)


@st.composite
def shaped_pairs(draw, max_degree=12, max_coeff=5):
    """``P = sum_{k>=2} a_k t^k`` and ``Q = 1 + sum_{k>=2} b_k t^k``, both nonzero."""
    deg_p = draw(st.integers(2, max_degree))
    deg_q = draw(st.integers(2, max_degree))
    a = [0, 0] + [draw(st.integers(0, max_coeff)) for _ in range(deg_p - 2)] + [draw(st.integers(1, max_coeff))]
    b = [1, 0] + [draw(st.integers(0, max_coeff)) for _ in range(deg_q - 2)] + [draw(st.integers(1, max_coeff))]
    return UniPoly([Fraction(x) for x in a]), UniPoly([Fraction(x) for x in b])
