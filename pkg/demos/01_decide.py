"""
Deciding size-change termination
================================

Parse an instance, close its graphs under composition, and read off the
verdict.  A non-terminating instance comes with a witness: an idempotent
loop element of the closure with no strict self-arc, plus the call path
that produces it.
"""

from sctrank import Variant, builtin, closure, decide_sct, parse_instance

sec46 = builtin("sec46")
print(sec46.graph("g1"))
print(sec46.graph("g2"))

v = decide_sct(sec46)
print("sec46 terminating:", v.terminating, "| closure size:", v.closure_size)

# every closure element remembers the graphs it was composed from
for e in closure(sec46):
    print("  ", " ".join(e.witness_path), "->", sorted(str(a) for a in e.arcs))

swap = parse_instance("""
instance swap
flowpoint f vars x y
graph g : f -> f
  x >= y
  y >= x
end
""")
v = decide_sct(swap)
print("swap terminating:", v.terminating)
print("witness:", v.witness.as_graph(), "via", v.witness.witness_path)

# the second variant looks at every loop element, not just idempotent ones
print("all-graphs agrees:", decide_sct(swap, Variant.ALL_GRAPHS).terminating == v.terminating)

# fig6 as drawn: G2 has only non-strict arcs, so G2 G2 G2 ... never descends
print("fig6 witness path:", decide_sct(builtin("fig6")).witness.witness_path)
