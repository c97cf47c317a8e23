"""
Sierpinski space and why bottom cannot be enumerated
====================================================

Two points, one open singleton.  Halting programs give points that turn into
top exactly when the program stops.
"""

from effspace import Enumerator, friedberg_diagnostic, make_sierpinski, pair
from effspace.cli import probe_battery
from effspace.continuity import classify_probe

S = make_sierpinski()

# The distance is 0 from bot to top and 1 the other way round.
print(S.basis_table(3))
print("strong inclusion at equal radii:", S.incl_table())

###############################################################################
# Halting points
# --------------
# ``halting_point(p)`` is bot until program ``p`` halts.  Its top membership
# is confirmed at the halting step, never refuted.

yes, no = probe_battery(S, 3, 3)
for p in yes + no:
    hp, top = classify_probe(S, p, 10**4)
    print(f"  program {p}: point {hp}, top {top}")

###############################################################################
# Specialization: bot lies below top
# ----------------------------------

for rec in friedberg_diagnostic(S, None, [], 10**5):
    print(" ", rec.name, rec.status, rec.witness)

###############################################################################
# Candidate enumerations of bottom's indices
# ------------------------------------------
# Listing a halting probe is caught as unsound.  A candidate that is sound on
# the probes is refuted by a diagonal point that halts iff it is listed.

greedy = Enumerator.of([S.bot, S.halting_point(yes[0])])
careful = Enumerator.of([S.bot] + [S.halting_point(p) for p in no])
for label, cand in (("greedy", greedy), ("careful", careful)):
    fails = [r for r in friedberg_diagnostic(S, cand, yes + no, 10**5) if r.status == "fail"]
    print(label, [(r.name, r.witness) for r in fails])

# top is the only other point, and {top} is the whole story
print("top in <1,0>:", S.tau.member(S.top, pair(1, 0), 100).confirmed)
