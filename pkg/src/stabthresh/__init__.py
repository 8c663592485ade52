"""Stabilization thresholds for pairs of nonnegative polynomials.

The main entry points::

    from stabthresh import parse_uni, real_threshold
    res = real_threshold(parse_uni("t^2+t^3"), parse_uni("1+t^2"), 1.0)
    res.value, res.integer_value      # 2.1518..., 3
"""

from .catalog import parse_space
from .mhodge import mh_integer_threshold, mh_reduce, mh_verify
from .oracle import threshold_bracket, verify_inequality
from .polycore import TriPoly, UniPoly, parse_poly, parse_uni
from .threshold import integer_threshold, real_threshold

__all__ = [
    "TriPoly",
    "UniPoly",
    "integer_threshold",
    "mh_integer_threshold",
    "mh_reduce",
    "mh_verify",
    "parse_poly",
    "parse_space",
    "parse_uni",
    "real_threshold",
    "threshold_bracket",
    "verify_inequality",
]
