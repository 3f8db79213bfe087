"""Ranking-function synthesis for fan-out free and fan-in free instances.

The engine works on *rank vectors*: tuples that alternate non-empty sets
of variables with integers in ``[0, B]``.  ``next_vector(v, G)`` is the
vector that is guaranteed to be smaller after a transition along ``G``.
Closing the initial vector under ``next`` yields a finite graph whose
sink strongly connected components are thread preservers of the derived
all-strict instance, so the min over such a component (after removing
dominated vectors) is a ranking function.

The fan-in free case runs the same construction on the transposed
instance and inverts the numeric entries, giving a ``max`` document.
:func:`synthesize` handles arbitrary control-flow graphs by ranking each
strongly connected component separately and prefixing the component's
reverse-topological index.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import AbstractSet, Iterable, Sequence, Union

import networkx as nx

from .decide import decide_sct
from .errors import BudgetExceeded, ClassificationError, InstanceError, NonTerminatingError, UndefinedSuccessor
from .model import Acg, SizeChangeGraph, fanning_in_graph, fanning_out_graph, is_strongly_connected, transpose
from .ranking import Const, RankingDoc, RankTuple, VarSet

__all__ = [
    "RankVector",
    "PositionAnalysis",
    "VectorGraph",
    "image",
    "analyze_positions",
    "next_vector",
    "reachable_vectors",
    "sink_scc_preserver",
    "dominates",
    "normalize",
    "tuple_dominates",
    "normalize_tuples",
    "simplify",
    "size_clash",
    "encode_sizes",
    "guard_sizes",
    "default_bound",
    "synthesize_fanout",
    "synthesize_fanin",
    "synthesize",
    "DEFAULT_MAX_VECTORS",
]

DEFAULT_MAX_VECTORS = 1_000_000


@dataclass(frozen=True)
class RankVector:
    """``⟨S1, v2, S3, v4, ...⟩`` at a flow point; sets at even list indices."""

    flowpoint: str
    entries: tuple
    bound: int

    def __post_init__(self):
        ents = tuple(frozenset(e) if i % 2 == 0 else e for i, e in enumerate(self.entries))
        object.__setattr__(self, "entries", ents)
        if self.bound <= 0:
            raise InstanceError(f"vector bound must be positive, got {self.bound}")
        if not ents or len(ents) % 2:
            raise InstanceError(f"rank vector must have even, non-zero length: {self}")
        used: set[str] = set()
        for i, e in enumerate(ents):
            if i % 2 == 0:
                if not e:
                    raise InstanceError(f"empty set at position {i + 1} of {self}")
                if used & e:
                    raise InstanceError(f"set positions of {self} overlap")
                used |= e
            elif not (isinstance(e, int) and 0 <= e <= self.bound):
                raise InstanceError(f"numeric entry {e!r} of {self} outside [0, {self.bound}]")

    @property
    def sets(self) -> tuple[frozenset, ...]:
        return self.entries[0::2]

    @property
    def numbers(self) -> tuple[int, ...]:
        return self.entries[1::2]

    def variables(self) -> frozenset:
        return frozenset().union(*self.sets)

    def key(self):
        return (self.flowpoint, tuple(tuple(sorted(e)) if i % 2 == 0 else e for i, e in enumerate(self.entries)))

    def to_tuple(self) -> RankTuple:
        return tuple(VarSet(tuple(e)) if i % 2 == 0 else Const(e) for i, e in enumerate(self.entries))

    def __str__(self) -> str:
        parts = ["{" + ",".join(sorted(e)) + "}" if i % 2 == 0 else str(e) for i, e in enumerate(self.entries)]
        return f"{self.flowpoint}:<" + ",".join(parts) + ">"


@dataclass(frozen=True)
class PositionAnalysis:
    """Per set position (1-based odd index ``i``): ``Im_i`` and its descent flag."""

    images: tuple[frozenset, ...]
    descending: tuple[bool, ...]

    @property
    def first_descending(self) -> int | None:
        for k, d in enumerate(self.descending):
            if d:
                return 2 * k + 1
        return None


@dataclass
class VectorGraph:
    nodes: list[RankVector] = field(default_factory=list)
    edges: list[tuple[RankVector, str, RankVector]] = field(default_factory=list)

    def digraph(self) -> nx.DiGraph:
        dg = nx.DiGraph()
        dg.add_nodes_from(self.nodes)
        dg.add_edges_from((u, v) for u, _, v in self.edges)
        return dg


def image(s: AbstractSet[str], g: SizeChangeGraph) -> frozenset:
    return frozenset(arc.target for arc in g.arcs if arc.source in s)


def analyze_positions(v: RankVector, g: SizeChangeGraph) -> PositionAnalysis:
    if v.flowpoint != g.source:
        raise InstanceError(f"vector at {v.flowpoint!r} but graph {g.id!r} leaves {g.source!r}")
    images, desc = [], []
    seen: frozenset = frozenset()
    for s in v.sets:
        full = image(s, g)
        im = full - seen
        seen |= full
        images.append(im)
        if len(im) < len(s):
            desc.append(True)
        else:
            desc.append(any(arc.strict and arc.source in s and arc.target in im for arc in g.arcs))
    return PositionAnalysis(tuple(images), tuple(desc))


def next_vector(v: RankVector, g: SizeChangeGraph, target_vars: Sequence[str]) -> RankVector | None:
    """The successor of ``v`` along ``g``, or ``None`` where it is undefined."""
    pa = analyze_positions(v, g)
    B = v.bound
    i = pa.first_descending
    ents = v.entries

    def prefix(upto: int) -> list:
        # Im_1, v_2, Im_3, ..., Im_upto for a 1-based odd position upto
        return [pa.images[k // 2] if k % 2 == 0 else ents[k] for k in range(upto)]

    def finish(out: list) -> RankVector:
        s = frozenset(target_vars).difference(*out[0::2])
        if s:
            out += [s, B]
        return RankVector(g.target, tuple(out), B)

    if i is None:  # N3
        if ents[-1] == 0:
            return None
        return RankVector(g.target, tuple(prefix(len(ents) - 1) + [ents[-1] - 1]), B)
    if pa.images[i // 2]:  # N1
        return finish(prefix(i) + [B])
    # N2
    if i == 1 or ents[i - 2] == 0:
        return None
    return finish(prefix(i - 2) + [ents[i - 2] - 1])


def default_bound(a: Acg) -> int:
    return a.m * 2**a.n


def reachable_vectors(
    a: Acg,
    B: int | None = None,
    initial: str | None = None,
    max_vectors: int = DEFAULT_MAX_VECTORS,
) -> VectorGraph:
    """Close ``⟨Var(initial), B⟩`` under ``next`` for every graph.

    Raises :class:`UndefinedSuccessor` if some reachable vector has no
    successor, which happens only for non-terminating or fanning-out input.
    """
    B = default_bound(a) if B is None else B
    start = initial or a.initial
    v0 = RankVector(start, (frozenset(a.vars_of(start)), B), B)
    vars_of = {fp.name: fp.vars for fp in a.flowpoints}
    out_graphs = {fp.name: a.graphs_from(fp.name) for fp in a.flowpoints}
    vg = VectorGraph([v0])
    seen = {v0}
    queue = deque([v0])
    while queue:
        v = queue.popleft()
        for g in out_graphs[v.flowpoint]:
            w = next_vector(v, g, vars_of[g.target])
            if w is None:
                raise UndefinedSuccessor(
                    f"next({v}, {g.id}) is undefined: instance not terminating or not fan-out free"
                )
            vg.edges.append((v, g.id, w))
            if w not in seen:
                if len(seen) >= max_vectors:
                    raise BudgetExceeded(f"more than {max_vectors} reachable vectors")
                seen.add(w)
                vg.nodes.append(w)
                queue.append(w)
    return vg


def sink_scc_preserver(vg: VectorGraph) -> frozenset:
    """Node set of the sink SCC with the smallest canonical node key."""
    dg = vg.digraph()
    cond = nx.condensation(dg)
    sinks = [cond.nodes[c]["members"] for c in cond.nodes if cond.out_degree(c) == 0]
    return frozenset(min(sinks, key=lambda ms: min(v.key() for v in ms)))


def _size(e) -> int:
    return len(e) if isinstance(e, frozenset) else e


def dominates(v: RankVector, u: RankVector) -> bool:
    """Some index has equal entries before it and a smaller entry in ``v``."""
    for a, b in zip(v.entries, u.entries):
        if _size(a) < _size(b):
            return True
        if a != b:
            return False
    return False


def _prune(items: list, dom) -> list:
    return [u for u in items if not any(dom(v, u) for v in items if v is not u)]


def normalize(s: Iterable[RankVector]) -> frozenset:
    """Remove every vector dominated by another member of ``s``."""
    items = sorted(set(s), key=RankVector.key)
    return frozenset(_prune(items, dominates))


def _entry_size(e):
    if isinstance(e, Const):
        return ("n", e.value)
    if isinstance(e, VarSet):
        return ("s", len(e))
    return None


def tuple_dominates(t: RankTuple, u: RankTuple, mode: str = "min") -> bool:
    """Tuple-level domination: ``t`` is pointwise below (min) or above (max) ``u``.

    Only constants and variable sets take part; any other entry kind stops
    the scan unless both tuples carry the identical entry.
    """
    for a, b in zip(t, u):
        ka, kb = _entry_size(a), _entry_size(b)
        if ka is not None and kb is not None and ka[0] == kb[0] and ka[1] != kb[1]:
            return ka[1] < kb[1] if mode == "min" else ka[1] > kb[1]
        if a != b:
            return False
    return False


def normalize_tuples(tuples: Iterable[RankTuple], mode: str = "min") -> list:
    items = list(dict.fromkeys(tuple(t) for t in tuples))
    return _prune(items, lambda v, u: tuple_dominates(v, u, mode))


def _expand(t: RankTuple) -> list:
    pieces = []
    for e in t:
        if isinstance(e, VarSet) and len(e) > 1:
            opts = []
            for perm in itertools.permutations(e.vars):
                seq = []
                for x in perm:
                    seq += [VarSet((x,)), Const(0)]
                opts.append(tuple(seq[:-1]))
            pieces.append(opts)
        else:
            pieces.append([(e,)])
    return [sum(choice, ()) for choice in itertools.product(*pieces)]


def simplify(s: Iterable[Union[RankVector, RankTuple]], mode: str = "min") -> list:
    """Split multi-variable sets into all orderings of singletons, then re-normalize."""
    tuples = [x.to_tuple() if isinstance(x, RankVector) else tuple(x) for x in s]
    return normalize_tuples([w for t in tuples for w in _expand(t)], mode)


_simplify = simplify  # the pipelines take a parameter of the same name


def size_clash(t: RankTuple, u: RankTuple) -> bool:
    """True when the first structural difference of ``t`` and ``u`` is a set size.

    Two values can then agree up to that position and be ordered by
    cardinality alone, which singleton expansion cannot reproduce.
    """
    for a, b in zip(t, u):
        ka, kb = _entry_size(a), _entry_size(b)
        if ka != kb:
            return ka is not None and kb is not None and ka[0] == kb[0] == "s"
    return False


def encode_sizes(t: RankTuple, n: int) -> RankTuple:
    """Fold each set's size into the number before it (a new leading one for the first set).

    ``c`` becomes ``c*(n+1) + |next set|``; the order on values is unchanged.
    """
    def size(i):
        return len(t[i]) if i < len(t) and isinstance(t[i], VarSet) else 0

    out: list = [Const(size(0))] if t and isinstance(t[0], VarSet) else []
    for i, e in enumerate(t):
        out.append(Const(e.value * (n + 1) + size(i + 1)) if isinstance(e, Const) else e)
    return tuple(out)


def guard_sizes(a: Acg, rows: dict[str, list]) -> dict[str, list]:
    """Encode set sizes into the numbers when some graph links rows that clash."""
    for g in a.graphs:
        if any(size_clash(t, u) for t in rows[g.source] for u in rows[g.target]):
            return {fp: [encode_sizes(t, a.n) for t in ts] for fp, ts in rows.items()}
    return rows


# ---------------------------------------------------------------------------
# pipelines


def _require_terminating(a: Acg) -> None:
    verdict = decide_sct(a)
    if not verdict.terminating:
        raise NonTerminatingError(
            f"instance {a.name!r} is not size-change terminating; witness {verdict.witness}", verdict
        )


def _require(a: Acg, fan: str) -> None:
    bad = fanning_out_graph(a.graphs) if fan == "out" else fanning_in_graph(a.graphs)
    if bad is not None:
        raise ClassificationError(f"instance {a.name!r} is not fan-{fan} free: graph {bad.id!r}")
    if not is_strongly_connected(a):
        raise ClassificationError(f"control-flow graph of {a.name!r} is not strongly connected")


def _preserver_rows(a: Acg) -> dict[str, frozenset]:
    vg = reachable_vectors(a)
    sink = sink_scc_preserver(vg)
    rows = {}
    for fp in a.flowpoints:
        here = [v for v in sink if v.flowpoint == fp.name]
        if not here:  # pragma: no cover - impossible for strongly connected input
            raise UndefinedSuccessor(f"sink component misses flow point {fp.name!r}")
        assert all(v.variables() == frozenset(fp.vars) for v in here)
        rows[fp.name] = normalize(here)
    return rows


def synthesize_fanout(a: Acg, simplify: bool = True, check: bool = True) -> RankingDoc:
    """A ``min`` ranking for a fan-out free, strongly connected, terminating instance."""
    if check:
        _require(a, "out")
        _require_terminating(a)
    rows = {fp: [v.to_tuple() for v in sorted(vecs, key=RankVector.key)] for fp, vecs in _preserver_rows(a).items()}
    if simplify:
        rows = {fp: _simplify(ts, "min") for fp, ts in guard_sizes(a, rows).items()}
    return RankingDoc(a.name, "min", rows)


def _fanin_tuple(v: RankVector, n: int, top: int) -> RankTuple:
    out: list = []
    for i, e in enumerate(v.entries):
        if i % 2 == 0:
            out.append(VarSet(tuple(e)))
        else:
            follow = len(v.entries[i + 1]) if i + 1 < len(v.entries) else 0
            out.append(Const(top - (e * n + follow)))
    return tuple(out)


def synthesize_fanin(a: Acg, simplify: bool = True, check: bool = True) -> RankingDoc:
    """A ``max`` ranking for a fan-in free, strongly connected, terminating instance.

    The fan-out construction runs on the transposed instance.  Each numeric
    entry ``v`` absorbs the size of the set after it as ``v*n + |S|`` (the
    first set has nothing before it) and is then inverted as ``C - (v*n + |S|)``
    with ``C = (B + 1) * n``, which keeps every constant positive.
    """
    if check:
        _require(a, "in")
        _require_terminating(a)
    t = transpose(a)
    n = a.n
    top = (default_bound(a) + 1) * n
    rows = {
        fp: normalize_tuples([_fanin_tuple(v, n, top) for v in sorted(vecs, key=RankVector.key)], "max")
        for fp, vecs in _preserver_rows(t).items()
    }
    if simplify:
        rows = {fp: _simplify(ts, "max") for fp, ts in guard_sizes(a, rows).items()}
    return RankingDoc(a.name, "max", rows)


def _sub_instance(a: Acg, members: set[str]) -> Acg | None:
    fps = tuple(fp for fp in a.flowpoints if fp.name in members)
    graphs = tuple(g for g in a.graphs if g.source in members and g.target in members)
    if not graphs:
        return None
    initial = a.initial if a.initial in members else min(members)
    return Acg(a.name, fps, initial, graphs)


def scc_order(a: Acg) -> list[set[str]]:
    """CFG components in topological order (sources first), ties by smallest name."""
    from .model import cfg_digraph

    cond = nx.condensation(cfg_digraph(a))
    order = nx.lexicographical_topological_sort(cond, key=lambda c: min(cond.nodes[c]["members"]))
    return [set(cond.nodes[c]["members"]) for c in order]


def synthesize(a: Acg, mode: str = "auto", simplify: bool = True) -> RankingDoc:
    """Rank an arbitrary terminating instance one CFG component at a time.

    Component ``i`` (counting ``1`` for the last in topological order) has
    ``Const(i)`` prepended to all its tuples, so every transition between
    components descends in the first entry.
    """
    if mode not in ("auto", "fanout", "fanin"):
        raise ValueError(f"mode must be auto, fanout or fanin, not {mode!r}")
    _require_terminating(a)
    comps = scc_order(a)
    subs = [(members, _sub_instance(a, members)) for members in comps]

    def offender(fan: str):
        for members, sub in subs:
            if sub is None:
                continue
            bad = fanning_out_graph(sub.graphs) if fan == "out" else fanning_in_graph(sub.graphs)
            if bad is not None:
                return members, bad
        return None

    out_bad, in_bad = offender("out"), offender("in")
    if mode == "auto":
        if out_bad is None:
            mode = "fanout"
        elif in_bad is None:
            mode = "fanin"
        else:
            raise ClassificationError(
                f"component {sorted(out_bad[0])} is not fan-out free (graph {out_bad[1].id!r}) "
                f"and component {sorted(in_bad[0])} is not fan-in free (graph {in_bad[1].id!r})"
            )
    bad = out_bad if mode == "fanout" else in_bad
    if bad is not None:
        kind = "out" if mode == "fanout" else "in"
        raise ClassificationError(f"component {sorted(bad[0])} is not fan-{kind} free: graph {bad[1].id!r}")

    doc_mode = "min" if mode == "fanout" else "max"
    rows: dict[str, list] = {}
    k = len(subs)
    for t, (members, sub) in enumerate(subs):
        idx = Const(k - t)
        if sub is None:
            for fp in members:
                rows[fp] = [(idx, Const(0))]
            continue
        part = (synthesize_fanout if mode == "fanout" else synthesize_fanin)(sub, simplify, check=False)
        for fp, ts in part.rows.items():
            rows[fp] = [(idx,) + tuple(tt) for tt in ts]
    ordered = {fp.name: rows[fp.name] for fp in a.flowpoints}
    return RankingDoc(a.name, doc_mode, ordered)
