"""
Effective operators, moduli and non-inclusion witnesses
=======================================================

An operator acts on point indices.  We certify a modulus of continuity with
interval arithmetic and hunt for counterexamples when a ball is too wide.
"""

from fractions import Fraction

from effspace import RegularityWitness, build_noninclusion_witness, make_reals, modulus, run
from effspace.continuity import (continuous_from_pointwise, dense_selector, modulus_code,
                                 real_operator)
from effspace.numbering import lacombe_member

R = make_reals()
F = real_operator(R, "add_const", 1)  # x -> x + 1
zero = R.point(0)

###############################################################################
# A modulus at a point
# --------------------
# Which neighbourhood of 0 is mapped into (7/8, inf)?

target = R.ball(Fraction(15, 8), 0)
a = modulus(F, zero, target, 10**5).witness
print("F maps", R.interval(a), "into", F.interval_ext(R.interval(a)))

###############################################################################
# Regularity of the codomain
# --------------------------
# ``s`` refines a neighbourhood, ``t`` covers the rest of the space with
# balls of the other topology, kept clear of the refinement.

W = RegularityWitness(R.q, R.tau)
m = R.ball(Fraction(-1, 4), 2)  # (-1/2, inf)
s = run(W.s(zero, m), 10**5).witness
print("s(0, m) =", R.interval(s))
print("cover starts with", [str(R.interval(c, conj=True)) for c in W.t(zero, m).codes(50)][:4])

###############################################################################
# A witness for non-inclusion
# ---------------------------
# Doubling does not map (-3, inf) into (-1/2, inf).  ``r`` finds a dense
# point of (-3, inf) whose image lands in the cover.

G = real_operator(R, "scale2")
k = dense_selector(R)
wit = build_noninclusion_witness(G, W, k)
out, rung = wit.run_r(zero, R.ball(-2, 0), m)
z = R.value(out.witness)
print(f"z = {z}, 2z = {2 * z}, found at fuel rung {rung}")

###############################################################################
# From pointwise to global continuity
# -----------------------------------
# The modulus gives ``h``; over the dense base it yields a Lacombe set
# for the preimage of (7/8, inf), which is (-1/8, inf).

g = continuous_from_pointwise(F, modulus_code(F), k)
L = R.registry[R.registry.apply(g, target, 100).witness]
for x in (Fraction(-1, 4), Fraction(-1, 16), Fraction(1, 2)):
    inside = lacombe_member(R.tau, L, R.point(x), 10**5).confirmed
    print(f"  {str(x):>6}: {'in' if inside else 'not confirmed'}")
