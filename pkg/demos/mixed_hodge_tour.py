"""Mixed Hodge thresholds: reductions, exact verdicts and a non-existence witness.

Run with ``python3 demos/mixed_hodge_tour.py``.
"""

from stabthresh import parse_space
from stabthresh.catalog import mh_pi_poly, mh_poly
from stabthresh.mhodge import (
    CubeRegion,
    default_reduction,
    mh_nonexistence_witness,
    mh_space_integer_threshold,
    mh_verify,
    p1_example,
)

# %%
# Integer thresholds on [1, inf)^3.  The reduction gives an upper bound;
# a witness at one less makes the verdict exact.
for text in ["cp(1)", "cp(2)", "S2", "toric(1,1)", "toric(2,2)", "toric(1,2)"]:
    x = parse_space(text)
    verdict = mh_space_integer_threshold(x)
    red = default_reduction(x)
    print(
        f"{text:11s} phi={red.phi!s:9s} reduced value={verdict.bound.value:.6f} "
        f"integer={verdict.value} exact={verdict.exact}"
    )

# %%
# Sampling check of the inequality on a finite cube.
x = parse_space("cp(2)")
print("\ncp(2), q=2 on [1,10]^3:", mh_verify(mh_pi_poly(x), mh_poly(x), 2, CubeRegion(1, 10)))

# %%
# The modified pair P1 has no threshold near the origin: for any q a
# violating point exists once the cube reaches small coordinates.
Pm, Qm = p1_example(2)
for q in [1, 5, 10, 100]:
    w = mh_nonexistence_witness(Pm, Qm, q, lo=1e-6)
    print(f"P1(n=2) q={q:<4d} witness t={w.t:.4g} u={w.u:.4g} v={w.v:.4g}")

# On [1, inf)^3 the same search finds nothing for large q.
print("P1(n=2) q=5 on [1,inf)^3:", mh_nonexistence_witness(Pm, Qm, 5, lo=1))
