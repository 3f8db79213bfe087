"""
Rank vectors and next()
=======================

A rank vector alternates variable sets with counters bounded by
B = m * 2^n.  ``next_vector`` gives the vector that is guaranteed to be
smaller after a transition.  Follow one thread on fig6, then close the
initial vector of sec46 and keep the sink component.
"""

from sctrank import RankVector, builtin, next_vector, reachable_vectors
from sctrank.rankgen import analyze_positions, normalize, sink_scc_preserver

fig6 = builtin("fig6")
v = RankVector("f", ({"x", "y", "z"}, 8), 8)
print(v)
for gid in ("G3", "G2", "G1", "G2"):
    pa = analyze_positions(v, fig6.graph(gid))
    v = next_vector(v, fig6.graph(gid), "xyz")
    print(f"--{gid}--> {v}   (first descending position: {pa.first_descending})")

sec46 = builtin("sec46")
vg = reachable_vectors(sec46)
print("reachable vectors (B=4):")
for src, gid, dst in vg.edges:
    print(f"  {src} --{gid}--> {dst}")

sink = sink_scc_preserver(vg)
print("sink component:", sorted(map(str, sink)))
print("normal form:", sorted(map(str, normalize(sink))))

# the counter-example instance has a sink holding a dominated vector
sink = sink_scc_preserver(reachable_vectors(builtin("sec46_counter")))
print(len(sink), "vectors in the sink,", len(normalize(sink)), "after removing dominated ones")
