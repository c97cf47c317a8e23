"""
Computable reals with the upper and lower topologies
====================================================

Points are indices, neighbourhoods are ball codes ``<a,e>``, and every
question is a fuel-bounded semi-decision.
"""

from fractions import Fraction

from effspace import converge, limit_pass, make_reals, run, sb_search, unpair

R = make_reals()

# The dyadic 1/2 as a computable point.  Its index is all we get to hold.
half = R.point(Fraction(1, 2))

# Upper balls are rays (u - 2^-e, inf), lower balls are (-inf, u + 2^-e).
m = R.ball(0, 0)
print("B_m in the upper topology:", R.interval(m))
print("B_m in the lower topology:", R.interval(m, conj=True))

# Membership is only ever confirmed.  Exact base points can also say a definite
# no (Exhausted before the fuel is spent); general points just run out of fuel.
print(R.tau.member(half, m, 10**4))
print(R.tau.member(half, R.ball(2, 1), 10**4))

###############################################################################
# Strong inclusion and the strong basis property
# ----------------------------------------------
# A ball strongly inside two neighbourhoods of 1/2 is found by search.

n = R.ball(Fraction(5, 8), 2)  # (3/8, inf)
out = sb_search(R.tau, half, m, n, 10**5)
a = out.witness
print("sb found", R.interval(a), "after", out.steps, "ticks")
print("a < m:", run(R.tau.strong_incl(a, m), 100).confirmed)

###############################################################################
# Converging to a point and passing to the limit
# ----------------------------------------------

chain = converge(R.tau, half)
for code in chain.prefix(6):
    centre, e = unpair(code)
    print(f"  e={e:<3d} {R.interval(code)}")

limit = limit_pass(R.tau, chain, 10**5).witness
print("limit lies in (7/16, inf):",
      R.tau.member(limit, R.ball(Fraction(1, 2), 4), 10**5).confirmed)
