"""
Synthesizing ranking functions
==============================

Fan-out free instances get a ``min`` document, fan-in free ones a
``max`` document built on the transposed instance.  ``synthesize``
handles arbitrary control-flow graphs one strongly connected component
at a time, prefixing a component index.
"""

from sctrank import builtin, parse_instance, synthesize, synthesize_fanin, synthesize_fanout, verify_ranking

sec46 = builtin("sec46")
print(synthesize_fanout(sec46, simplify=False), end="")
print(synthesize_fanout(sec46), end="")

fig3 = builtin("fig3")  # fan-in free only
doc = synthesize_fanin(fig3)
print(doc, end="")
print("fig3 valid:", verify_ranking(fig3, doc).valid)

chain = parse_instance("""
instance chain
flowpoint f vars x
flowpoint g vars x
graph a : f -> f
  x > x
end
graph b : f -> g
end
graph c : g -> g
  x > x
end
""")
doc = synthesize(chain)
print(doc, end="")
print("chain valid:", verify_ranking(chain, doc).valid)

# expanding {x0,x1} into x0,0,x1 loses the set's size, which the order
# compares first; when two linked rows could tie up to such a position
# the pipeline folds sizes into the counters before expanding
clash = parse_instance("""
instance clash
flowpoint f0 vars x0 x1 x2
flowpoint f1 vars x0 x1 x2
graph g1 : f0 -> f1
  x0 > x0
  x1 >= x2
  x2 >= x0
end
graph g2 : f1 -> f0
  x0 >= x1
  x1 >= x0
  x2 > x2
end
graph g3 : f1 -> f1
  x0 >= x2
  x1 >= x1
  x2 > x2
end
""")
print(synthesize_fanout(clash, simplify=False), end="")
doc = synthesize_fanout(clash)
print(doc, end="")
print("clash valid:", verify_ranking(clash, doc).valid)
