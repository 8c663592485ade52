"""A short tour of real and integer stabilization thresholds.

Run with ``python3 demos/thresholds_tour.py``.  Every number printed is
computed; nothing is hard-coded.
"""

from stabthresh import integer_threshold, parse_space, parse_uni, real_threshold, threshold_bracket
from stabthresh.catalog import cohomology_poincare, homotopy_poincare
from stabthresh.curve import curve_domain, curve_limit

# %%
# Spheres and complex projective spaces.
# P is the homotopy Poincare polynomial (times t), Q the cohomology one.
for text in ["S3", "S4", "S6", "cp(1)", "cp(2)", "cp(3)"]:
    x = parse_space(text)
    P, Q = homotopy_poincare(x), cohomology_poincare(x)
    res = real_threshold(P, Q, 1.0)
    print(f"{text:6s} P={P!s:14s} Q={Q!s:18s} value={res.value:.10f} integer={res.integer_value}")

# %%
# The threshold is a maximum over the implicit curve; its pieces are visible.
P, Q = parse_uni("t^4 + t^7"), parse_uni("1 + t^4")
dom = curve_domain(P, Q, 1.0)
lim = curve_limit(P, Q)
print("\ncurve domain for S4:", dom)
print("limit deg P / deg Q:", lim)

# %%
# The brute-force oracle brackets the same number independently.
br = threshold_bracket(P, Q, 1.0, tol=1e-6)
print("oracle bracket:", br.lo, br.hi)

# %%
# A pair whose integer threshold sits one above the ceiling because the
# real threshold is an integer attained at a finite point.
P, Q = parse_uni("2*t^2"), parse_uni("1 + t^2")
res = real_threshold(P, Q, 1.0)
print(f"\n(2t^2, 1+t^2): value={res.value:.12f} integer={integer_threshold(P, Q, 1.0)}")
