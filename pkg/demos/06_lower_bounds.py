"""
Instance families and ranking sizes
===================================

Three constructions force large rankings.  The first needs at least n!
tuples in a min-of-vectors ranking; the third has a known ranking with
exactly 2^n tuples.
"""

import math

from sctrank import Sampled, decide_sct, family_61, family_62, family_63, k_ranking, synthesize_fanout, verify_ranking

for n in (1, 2, 3):
    a = family_61(n)
    doc = synthesize_fanout(a)
    print(f"family_61({n}): {len(a.graphs)} graphs, {doc.size()} tuples (n! = {math.factorial(n)})")

for n in (1, 2, 3):
    print(f"family_62({n}): {len(family_62(n).graphs)} graphs, terminating={decide_sct(family_62(n)).terminating}")

doc = k_ranking(3)
print(doc, end="")
print("k_ranking(3) on family_63(3):", verify_ranking(family_63(3), doc, Sampled(100_000, 0)).valid)
