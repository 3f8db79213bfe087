import functools
import random

import pytest
from hypothesis import given, strategies as st

from helpers import arcs_dict, naive_compose, path_closure, random_graph, single
from sctrank.decide import Variant, closure, compose, decide_sct, identity_graph
from sctrank.errors import BudgetExceeded, InstanceError
from sctrank.generators import RandomParams, builtin, family_61, family_62, family_63, gen_random
from sctrank.model import Acg, FlowPoint, SizeChangeGraph, transpose

SEC46 = builtin("sec46")
G1, G2 = SEC46.graph("g1"), SEC46.graph("g2")


def test_compose_examples():
    assert arcs_dict(compose(G1, G2)) == {("x", "x"): True, ("y", "x"): True}
    assert arcs_dict(compose(G2, G2)) == {("x", "x"): True, ("y", "x"): True}


def test_compose_identity():
    ident = identity_graph("f", ("x", "y"))
    for g in (G1, G2):
        assert compose(g, ident).arcs == g.arcs
        assert compose(ident, g).arcs == g.arcs


def test_compose_mismatch():
    g = SizeChangeGraph("h", "g", "g")
    with pytest.raises(InstanceError, match="cannot compose"):
        compose(G1, g)


@given(st.integers(0, 2**32), st.integers(1, 4))
def test_compose_matches_naive_oracle(seed, n):
    rng = random.Random(seed)
    vs = [f"v{i}" for i in range(n)]
    a, b = random_graph(rng, "a", "f", "f", vs), random_graph(rng, "b", "f", "f", vs)
    assert arcs_dict(compose(a, b)) == naive_compose(a, b)


@given(st.integers(0, 2**32))
def test_compose_associative(seed):
    rng = random.Random(seed)
    vs = ["a", "b", "c"][: rng.randint(1, 3)]
    g1, g2, g3 = (random_graph(rng, f"g{i}", "f", "f", vs, 0.5) for i in range(3))
    assert compose(compose(g1, g2), g3).arcs == compose(g1, compose(g2, g3)).arcs


def test_closure_single_idempotent_graph():
    a = single({"g": [("x", ">", "x")]}, vars=("x",))
    els = closure(a)
    assert len(els) == 1 and els[0].witness_path == ("g",)


def test_closure_sec46_contains_composite():
    arcs = {frozenset(arcs_dict(e.as_graph()).items()) for e in closure(SEC46)}
    assert frozenset({("x", "x"): True, ("y", "x"): True}.items()) in arcs


def test_closure_two_points_all_pairs():
    a = Acg(
        "two",
        (FlowPoint("f", ("x",)), FlowPoint("g", ("x",))),
        "f",
        (
            SizeChangeGraph.build("a", "f", "g", [("x", ">", "x")]),
            SizeChangeGraph.build("b", "g", "f", [("x", ">=", "x")]),
        ),
    )
    assert {(e.source, e.target) for e in closure(a)} == {("f", "g"), ("g", "f"), ("f", "f"), ("g", "g")}


@given(st.integers(0, 10**6))
def test_closure_matches_path_enumeration(seed):
    a = gen_random(RandomParams(n=1 + seed % 3, m=1 + seed % 2, graphs=3, seed=seed))
    got = {(e.source, e.target, frozenset(arcs_dict(e.as_graph()).items())) for e in closure(a)}
    assert got == path_closure(a, 64)


@given(st.integers(0, 10**6))
def test_witness_paths_fold_to_arcs(seed):
    a = gen_random(RandomParams(n=2, m=2, graphs=4, seed=seed))
    for e in closure(a):
        folded = functools.reduce(compose, [a.graph(g) for g in e.witness_path])
        assert folded.arcs == e.arcs and (folded.source, folded.target) == (e.source, e.target)


def test_closure_is_closed():
    a = family_62(3)
    els = closure(a)
    keys = {(e.source, e.target, e.arcs) for e in els}
    for e in els:
        for g in a.graphs:
            c = compose(e.as_graph(), g)
            assert (c.source, c.target, c.arcs) in keys


def test_budget():
    with pytest.raises(BudgetExceeded):
        closure(family_62(3), max_elements=3)
    with pytest.raises(BudgetExceeded):
        decide_sct(family_62(3), max_elements=3)


def test_swap_is_not_terminating():
    a = single({"g": [("x", ">=", "y"), ("y", ">=", "x")]})
    v = decide_sct(a)
    assert not v.terminating
    w = v.witness.as_graph()
    assert arcs_dict(w) == {("x", "x"): False, ("y", "y"): False}
    assert compose(w, w).arcs == w.arcs
    other = decide_sct(a, Variant.ALL_GRAPHS)
    assert not other.terminating
    assert not any(x.strict and x.source == x.target for x in other.witness.arcs)


@pytest.mark.parametrize("name", ["sec46", "fig3", "fig5", "sec46_counter"])
def test_builtins_terminate(name):
    a = builtin(name)
    assert decide_sct(a).terminating and decide_sct(a, Variant.ALL_GRAPHS).terminating


def test_fig6_as_drawn_does_not_terminate():
    # G2 is drawn with thin (non-strict) arcs only: G2 repeated forever never descends
    v = decide_sct(builtin("fig6"))
    assert not v.terminating and v.witness.witness_path == ("G2",)


@pytest.mark.parametrize("family", [family_61, family_62, family_63])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_families_terminate(family, n):
    a = family(n)
    assert decide_sct(a).terminating
    assert decide_sct(a, Variant.ALL_GRAPHS).terminating


@given(st.integers(0, 10**6))
def test_variants_agree_and_transpose_invariant(seed):
    a = gen_random(RandomParams(n=1 + seed % 3, m=1 + seed % 2, graphs=1 + seed % 4, seed=seed,
                                strongly_connected=seed % 5 != 0, strict_prob=0.4))
    v1, v2 = decide_sct(a), decide_sct(a, Variant.ALL_GRAPHS)
    assert v1.terminating == v2.terminating
    assert decide_sct(transpose(a)).terminating == v1.terminating
    for v in (v1, v2):
        if v.witness is not None:
            folded = functools.reduce(compose, [a.graph(g) for g in v.witness.witness_path])
            assert folded.arcs == v.witness.arcs
            assert not v.witness.has_strict_self_arc()
    if v1.witness is not None:
        w = v1.witness.as_graph()
        assert w.source == w.target and compose(w, w).arcs == w.arcs
