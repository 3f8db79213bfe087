"""Thread preservers and the ranking constructions for strict instances."""

from __future__ import annotations

from collections import deque
from typing import AbstractSet

from .errors import ClassificationError, NonTerminatingError
from .model import Acg, classify, transpose
from .ranking import MaxVal, MinVal, RankingDoc

__all__ = [
    "VariableSet",
    "is_thread_preserver",
    "compute_mtp",
    "strict_min_ranking",
    "strict_max_ranking",
]

# members are (flow point name, variable name)
VariableSet = frozenset


def is_thread_preserver(a: Acg, p: AbstractSet[tuple[str, str]]) -> bool:
    """True iff every graph carries each P-variable at its source into P."""
    for g in a.graphs:
        for x in a.vars_of(g.source):
            if (g.source, x) not in p:
                continue
            if not any(arc.source == x and (g.target, arc.target) in p for arc in g.arcs):
                return False
    return True


def compute_mtp(a: Acg) -> VariableSet:
    """The maximal thread preserver, by counter-based deletion.

    ``count[(i, x)]`` is the number of arcs from source variable ``x`` of
    graph ``i`` into still-alive variables.  A variable dies as soon as one
    of its counters drops to zero; each arc is visited a constant number
    of times.
    """
    alive = set(a.all_variables())
    count: dict[tuple[int, str], int] = {}
    preds: dict[tuple[str, str], list[tuple[int, str]]] = {}
    doomed: deque[tuple[str, str]] = deque()
    for i, g in enumerate(a.graphs):
        for x in a.vars_of(g.source):
            count[(i, x)] = 0
        for arc in g.arcs:
            count[(i, arc.source)] += 1
            preds.setdefault((g.target, arc.target), []).append((i, arc.source))
        for x in a.vars_of(g.source):
            if count[(i, x)] == 0:
                doomed.append((g.source, x))
    while doomed:
        v = doomed.popleft()
        if v not in alive:
            continue
        alive.discard(v)
        for i, x in preds.get(v, ()):
            count[(i, x)] -= 1
            if count[(i, x)] == 0:
                doomed.append((a.graphs[i].source, x))
    return frozenset(alive)


def _strict_ranking(a: Acg, p: VariableSet, mode: str) -> RankingDoc:
    rows = {}
    for fp in a.flowpoints:
        members = tuple(x for x in fp.vars if (fp.name, x) in p)
        if not members:
            raise NonTerminatingError(
                f"thread preserver misses flow point {fp.name!r}; instance is not terminating"
            )
        rows[fp.name] = [((MinVal if mode == "min" else MaxVal)(members),)]
    return RankingDoc(a.name, mode, rows)


def _check_strict(a: Acg, fan: str) -> None:
    c = classify(a)
    if not c.strict:
        raise ClassificationError("instance has non-strict arcs")
    if not getattr(c, fan):
        raise ClassificationError(f"instance is not {fan.replace('_', '-')}")
    if not c.strongly_connected:
        raise ClassificationError("control-flow graph is not strongly connected")


def strict_min_ranking(a: Acg) -> RankingDoc:
    """``rho_f = min`` of the MTP variables at ``f``; strict, fan-out free input."""
    _check_strict(a, "fan_out_free")
    p = compute_mtp(a)
    if not p:
        raise NonTerminatingError("maximal thread preserver is empty; instance is not terminating")
    return _strict_ranking(a, p, "min")


def strict_max_ranking(a: Acg) -> RankingDoc:
    """``rho_f = max`` of the transposed instance's MTP variables at ``f``."""
    _check_strict(a, "fan_in_free")
    p = compute_mtp(transpose(a))
    if not p:
        raise NonTerminatingError(
            "maximal thread preserver of the transposed instance is empty; instance is not terminating"
        )
    return _strict_ranking(a, p, "max")
