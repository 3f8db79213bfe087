"""
Checking a ranking certificate
==============================

The checker enumerates the value grid {0..2n-1}; any counterexample over
the integers collapses onto it.  A broken document yields a concrete
transition on which the rank fails to drop.
"""

import warnings

from sctrank import Exhaustive, Sampled, builtin, family_63, k_ranking, parse_ranking, verify_ranking

fig3 = builtin("fig3")
good = parse_ranking("ranking fig3 mode max\nf: {<y,0,z>, <x,1,z>}\n")
print(verify_ranking(fig3, good))

bad = parse_ranking("ranking fig3 mode max\nf: {<y,0,z>, <x,0,z>}\n")
rep = verify_ranking(fig3, bad)
print("valid:", rep.valid)
print("counterexample:", rep.counterexample)

# sampling can only refute, but scales past the exhaustive budget
print(verify_ranking(fig3, bad, Sampled(count=2000, seed=1)).valid)

k2 = k_ranking(2)
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    rep = verify_ranking(family_63(2), k2)
print(rep.mode_used, rep.degraded, caught[0].message if caught else "")
rep = verify_ranking(family_63(2), k2, Exhaustive(cap=10**10))
print(rep.mode_used, rep.valid, rep.checked, "modeled pairs")
