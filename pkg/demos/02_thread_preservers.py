"""
Thread preservers and the strict class
======================================

A thread preserver is a set of (flow point, variable) pairs that every
graph maps back into itself.  The maximal one is a greatest fixpoint.
When every arc is strict and the instance is fan-out free, a nonempty
maximal preserver alone gives a ranking: the min over it.
"""

from sctrank import builtin, compute_mtp, is_thread_preserver, parse_instance, transpose
from sctrank import strict_max_ranking, strict_min_ranking, verify_ranking

sec46 = builtin("sec46")
print("MTP of sec46:", sorted(compute_mtp(sec46)))
print("{y} alone preserves threads?", is_thread_preserver(sec46, {("f", "y")}))

strict = parse_instance("""
instance strict
flowpoint f vars x y
graph a : f -> f
  x > x
  y > y
end
graph b : f -> f
  x > y
  y > x
end
""")
doc = strict_min_ranking(strict)
print(doc, end="")
print("valid:", verify_ranking(strict, doc).valid)

# transposing swaps fan-in and fan-out; the max over the preserver ranks it
t = transpose(strict)
doc = strict_max_ranking(t)
print(doc, end="")
print("valid:", verify_ranking(t, doc).valid)
