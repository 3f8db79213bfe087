"""Small builders and independent brute-force oracles used across the tests."""

from __future__ import annotations

import itertools
import random
import textwrap

from sctrank.model import Acg, Arc, FlowPoint, Label, SizeChangeGraph, parse_instance


def inst(text: str) -> Acg:
    return parse_instance(textwrap.dedent(text))


def single(graphs: dict[str, list[tuple[str, str, str]]], vars=("x", "y"), name="t") -> Acg:
    """One flow point ``f``; graphs given as ``{id: [(x, ">", y), ...]}``."""
    gs = tuple(SizeChangeGraph.build(gid, "f", "f", arcs) for gid, arcs in graphs.items())
    return Acg(name, (FlowPoint("f", tuple(vars)),), "f", gs)


def random_graph(rng: random.Random, gid: str, src: str, tgt: str, vars, density=0.4) -> SizeChangeGraph:
    arcs = [
        Arc(x, y, Label.STRICT if rng.random() < 0.5 else Label.NONSTRICT)
        for x in vars
        for y in vars
        if rng.random() < density
    ]
    return SizeChangeGraph(gid, src, tgt, frozenset(arcs))


def valuations(vars, width):
    for vals in itertools.product(range(width), repeat=len(vars)):
        yield dict(zip(vars, vals))


# ---------------------------------------------------------------------------
# oracles that share no code with the package


def naive_compose(g1: SizeChangeGraph, g2: SizeChangeGraph) -> dict[tuple[str, str], bool]:
    """``{(x, z): strict}`` by looping over every 2-path."""
    out: dict[tuple[str, str], bool] = {}
    for a in g1.arcs:
        for b in g2.arcs:
            if a.target == b.source:
                k = (a.source, b.target)
                out[k] = out.get(k, False) or a.strict or b.strict
    return out


def arcs_dict(g) -> dict[tuple[str, str], bool]:
    return {(a.source, a.target): a.strict for a in g.arcs}


def path_closure(a: Acg, max_len: int) -> set:
    """All compositions of CFG paths with at most ``max_len`` graphs, as hashable keys."""
    def key(src, tgt, d):
        return (src, tgt, frozenset(d.items()))

    layer = {key(g.source, g.target, arcs_dict(g)) for g in a.graphs}
    seen = set(layer)
    for _ in range(max_len - 1):
        nxt = set()
        for src, tgt, arcs in layer:
            for g in a.graphs:
                if g.source != tgt:
                    continue
                d: dict = {}
                for (x, y), s1 in arcs:
                    for arc in g.arcs:
                        if arc.source == y:
                            k = (x, arc.target)
                            d[k] = d.get(k, False) or s1 or arc.strict
                nxt.add(key(src, g.target, d))
        nxt -= seen
        if not nxt:
            break
        seen |= nxt
        layer = nxt
    return seen


def brute_thread_preservers(a: Acg):
    """Every subset of the variables that is a thread preserver."""
    allv = sorted(a.all_variables())
    for r in range(len(allv) + 1):
        for sub in itertools.combinations(allv, r):
            p = set(sub)
            ok = True
            for g in a.graphs:
                for x in a.vars_of(g.source):
                    if (g.source, x) in p and not any(
                        arc.source == x and (g.target, arc.target) in p for arc in g.arcs
                    ):
                        ok = False
            if ok:
                yield frozenset(p)


def bag_min_key(values):
    # dual multiset order: cardinality, then ascending listing
    return (len(values), tuple(sorted(values)))


def bag_max_key(values):
    # multiset order: cardinality, then descending listing
    return (len(values), tuple(sorted(values, reverse=True)))


def brute_verify(a: Acg, doc):
    """Pure-python exhaustive check over the same grid, sharing only eval/models."""
    from sctrank.verify import Ordering, Valuation, eval_ranking, models, value_compare

    width = 2 * a.n
    for g in a.graphs:
        sv, tv = a.vars_of(g.source), a.vars_of(g.target)
        for s in valuations(sv, width):
            for t in valuations(tv, width):
                src, tgt = Valuation(g.source, s), Valuation(g.target, t)
                if models(g, src, tgt):
                    c = value_compare(eval_ranking(doc, src), eval_ranking(doc, tgt), doc.mode)
                    if c is not Ordering.GREATER:
                        return (g.id, s, t)
    return None
