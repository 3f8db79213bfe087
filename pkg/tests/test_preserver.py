import random

import pytest
from hypothesis import given, strategies as st

from helpers import brute_thread_preservers, single
from sctrank.decide import decide_sct
from sctrank.errors import ClassificationError, NonTerminatingError
from sctrank.generators import RandomParams, builtin, family_61, gen_random
from sctrank.model import transpose
from sctrank.preserver import compute_mtp, is_thread_preserver, strict_max_ranking, strict_min_ranking
from sctrank.ranking import MaxVal, MinVal
from sctrank.verify import verify_ranking

SEC46 = builtin("sec46")


def test_is_thread_preserver_examples():
    assert is_thread_preserver(SEC46, frozenset())
    assert is_thread_preserver(SEC46, {("f", "x"), ("f", "y")})
    assert not is_thread_preserver(SEC46, {("f", "y")})
    assert not is_thread_preserver(family_61(2), {("f", "x0")})


def test_mtp_examples():
    ident = single({"a": [("x", ">=", "x"), ("y", ">=", "y")], "b": [("x", ">=", "x"), ("y", ">=", "y")]})
    assert compute_mtp(ident) == ident.all_variables()
    assert compute_mtp(SEC46) == {("f", "x"), ("f", "y")}
    assert compute_mtp(single({"g": [("x", ">", "y")]})) == frozenset()


def _naive_mtp(a):
    p = set(a.all_variables())
    changed = True
    while changed:
        changed = False
        for g in a.graphs:
            for x in a.vars_of(g.source):
                if (g.source, x) in p and not any(
                    arc.source == x and (g.target, arc.target) in p for arc in g.arcs
                ):
                    p.discard((g.source, x))
                    changed = True
    return frozenset(p)


@given(st.integers(0, 10**6))
def test_mtp_matches_naive_fixpoint(seed):
    a = gen_random(RandomParams(n=1 + seed % 4, m=1 + seed % 3, graphs=1 + seed % 6, seed=seed,
                                strongly_connected=seed % 2 == 0, arc_prob=0.5))
    p = compute_mtp(a)
    assert p == _naive_mtp(a)
    assert is_thread_preserver(a, p)


@given(st.integers(0, 10**6))
def test_mtp_contains_every_preserver(seed):
    n = 1 + seed % 3
    m = 1 + (seed // 3) % 2
    a = gen_random(RandomParams(n=n, m=m, graphs=3, seed=seed, arc_prob=0.5))
    p = compute_mtp(a)
    for tp in brute_thread_preservers(a):
        assert tp <= p


STRICT_OUT = single({"a": [("x", ">", "x"), ("y", ">", "y")], "b": [("x", ">", "y"), ("y", ">", "x")]})


def test_drop_then_swap_has_empty_mtp():
    # {x>x} alone drops y, after which b's x -> y arc leads nowhere
    a = single({"a": [("x", ">", "x")], "b": [("x", ">", "y"), ("y", ">", "x")]})
    assert compute_mtp(a) == frozenset()
    assert not decide_sct(a).terminating


def test_strict_min_ranking_example():
    doc = strict_min_ranking(STRICT_OUT)
    assert doc.mode == "min" and doc.tuples("f") == ((MinVal(("x", "y")),),)
    assert verify_ranking(STRICT_OUT, doc).valid


def test_single_strict_self_loop():
    a = single({"g": [("x", ">", "x")]}, vars=("x",))
    assert str(strict_min_ranking(a)).splitlines()[1] == "f: {<min{x}>}"
    assert strict_max_ranking(a).tuples("f") == ((MaxVal(("x",)),),)


def test_strict_min_rejects():
    with pytest.raises(NonTerminatingError):
        strict_min_ranking(single({"g": [("x", ">", "y")]}))
    with pytest.raises(ClassificationError, match="non-strict"):
        strict_min_ranking(SEC46)
    with pytest.raises(ClassificationError, match="fan-out"):
        strict_min_ranking(builtin("fig5"))


def test_strict_max_ranking_transposed_example():
    t = transpose(STRICT_OUT)
    doc = strict_max_ranking(t)
    assert doc.mode == "max" and doc.tuples("f") == ((MaxVal(("x", "y")),),)
    assert verify_ranking(t, doc).valid


def test_strict_max_ranking_two_graphs():
    # fan-in free but x fans out under g1
    a = single({"g1": [("x", ">", "x"), ("x", ">", "y")], "g2": [("x", ">", "x"), ("y", ">", "y")]})
    doc = strict_max_ranking(a)
    assert doc.tuples("f") == ((MaxVal(("x", "y")),),)
    assert verify_ranking(a, doc).valid
    with pytest.raises(ClassificationError, match="fan-out"):
        strict_min_ranking(a)


@pytest.mark.parametrize("seed", range(60))
def test_mtp_nonempty_iff_terminating(seed):
    rng = random.Random(seed)
    m = rng.randint(1, 2)
    p = RandomParams(n=rng.randint(1, 3), m=m, graphs=rng.randint(m, 4), seed=seed,
                     strict_prob=1, fan_out_free=True)
    a = gen_random(p)
    assert bool(compute_mtp(a)) == decide_sct(a).terminating
    if decide_sct(a).terminating:
        assert verify_ranking(a, strict_min_ranking(a)).valid
        t = transpose(a)
        assert verify_ranking(t, strict_max_ranking(t)).valid
