"""Instances: flow points, size-change graphs, annotated control-flow graphs.

An instance is a control-flow multigraph whose every edge carries a
size-change graph.  This module holds the immutable domain types, the
plain-text instance format, structural classification and transposition.

Text format::

    instance sec46
    flowpoint f vars x y
    initial f           # optional, defaults to the first flow point
    graph g1 : f -> f
      x > y             # strict:     x  >  y'
      y >= y            # non-strict: x >= y'
    end

"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

import networkx as nx

from .errors import InstanceError, ParseError

__all__ = [
    "Label",
    "Arc",
    "FlowPoint",
    "SizeChangeGraph",
    "Acg",
    "Classification",
    "RESERVED",
    "parse_instance",
    "serialize_instance",
    "load_instance",
    "validate",
    "classify",
    "transpose",
    "cfg_digraph",
    "is_strongly_connected",
    "fanning_out_graph",
    "fanning_in_graph",
]

RESERVED = frozenset({"instance", "flowpoint", "vars", "initial", "graph", "end"})
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Label(enum.Enum):
    STRICT = ">"
    NONSTRICT = ">="

    @property
    def strict(self) -> bool:
        return self is Label.STRICT

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Arc:
    source: str
    target: str
    label: Label = Label.NONSTRICT

    @property
    def strict(self) -> bool:
        return self.label is Label.STRICT

    def __str__(self) -> str:
        return f"{self.source} {self.label} {self.target}"


def _collapse(arcs: Iterable[Arc]) -> frozenset[Arc]:
    # one arc per (source, target); strict wins
    best: dict[tuple[str, str], Arc] = {}
    for arc in arcs:
        key = (arc.source, arc.target)
        if key not in best or arc.strict:
            best[key] = arc
    return frozenset(best.values())


@dataclass(frozen=True)
class FlowPoint:
    name: str
    vars: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if len(set(self.vars)) != len(self.vars):
            raise InstanceError(f"duplicate variable in flow point {self.name!r}")

    def index(self, var: str) -> int:
        return self.vars.index(var)


@dataclass(frozen=True)
class SizeChangeGraph:
    """A bipartite graph of size-change arcs from ``source`` to ``target``.

    Arcs are kept as a frozenset with at most one arc per variable pair;
    if both labels are supplied for the same pair only the strict one is
    kept.
    """

    id: str
    source: str
    target: str
    arcs: frozenset[Arc] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "arcs", _collapse(self.arcs))

    @classmethod
    def build(cls, id: str, source: str, target: str, spec: Iterable[tuple[str, str, str]]):
        """Build from ``(x, op, y)`` triples where ``op`` is ``">"`` or ``">="``."""
        return cls(id, source, target, frozenset(Arc(x, y, Label(op)) for x, op, y in spec))

    def sorted_arcs(self) -> list[Arc]:
        return sorted(self.arcs, key=lambda a: (a.source, a.target))

    def out_arcs(self, var: str) -> list[Arc]:
        return [a for a in self.arcs if a.source == var]

    def in_degree(self, var: str) -> int:
        return sum(1 for a in self.arcs if a.target == var)

    def out_degree(self, var: str) -> int:
        return sum(1 for a in self.arcs if a.source == var)

    def transposed(self) -> "SizeChangeGraph":
        arcs = frozenset(Arc(a.target, a.source, a.label) for a in self.arcs)
        return SizeChangeGraph(self.id, self.target, self.source, arcs)

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.sorted_arcs())
        return f"{self.id}: {self.source} -> {self.target} {{{body}}}"


@dataclass(frozen=True)
class Acg:
    """Annotated control-flow graph (an SCT instance).

    Structural consistency (unique names, known variables, equal variable
    counts) is checked on construction.  Reachability of every flow point
    from ``initial`` is checked by :func:`validate`, which the parser calls;
    it is not enforced here because transposed instances used internally
    need not satisfy it.
    """

    name: str
    flowpoints: tuple[FlowPoint, ...]
    initial: str
    graphs: tuple[SizeChangeGraph, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "flowpoints", tuple(self.flowpoints))
        object.__setattr__(self, "graphs", tuple(self.graphs))
        if not self.flowpoints:
            raise InstanceError("instance has no flow points")
        names = [fp.name for fp in self.flowpoints]
        if len(set(names)) != len(names):
            raise InstanceError(f"duplicate flow point name in {names}")
        if self.initial not in names:
            raise InstanceError(f"initial flow point {self.initial!r} is not declared")
        sizes = {len(fp.vars) for fp in self.flowpoints}
        if len(sizes) != 1:
            raise InstanceError(f"flow points have unequal variable counts {sorted(sizes)}")
        ids = [g.id for g in self.graphs]
        if len(set(ids)) != len(ids):
            raise InstanceError("duplicate graph id")
        fps = {fp.name: fp for fp in self.flowpoints}
        for g in self.graphs:
            for end in (g.source, g.target):
                if end not in fps:
                    raise InstanceError(f"graph {g.id!r} names unknown flow point {end!r}")
            for arc in g.arcs:
                if arc.source not in fps[g.source].vars:
                    raise InstanceError(f"graph {g.id!r}: unknown variable {arc.source!r}")
                if arc.target not in fps[g.target].vars:
                    raise InstanceError(f"graph {g.id!r}: unknown variable {arc.target!r}")

    @property
    def m(self) -> int:
        return len(self.flowpoints)

    @property
    def n(self) -> int:
        return len(self.flowpoints[0].vars)

    def flowpoint(self, name: str) -> FlowPoint:
        for fp in self.flowpoints:
            if fp.name == name:
                return fp
        raise KeyError(name)

    def vars_of(self, name: str) -> tuple[str, ...]:
        return self.flowpoint(name).vars

    def graph(self, id: str) -> SizeChangeGraph:
        for g in self.graphs:
            if g.id == id:
                return g
        raise KeyError(id)

    def graphs_from(self, name: str) -> list[SizeChangeGraph]:
        return [g for g in self.graphs if g.source == name]

    def all_variables(self) -> frozenset[tuple[str, str]]:
        return frozenset((fp.name, x) for fp in self.flowpoints for x in fp.vars)


@dataclass(frozen=True)
class Classification:
    fan_in_free: bool
    fan_out_free: bool
    strict: bool
    strongly_connected: bool


# ---------------------------------------------------------------------------
# text format


_TOKEN = re.compile(r"\s*(?:(->|>=|>|:)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokens(line: str, lineno: int) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(3) is not None:
            raise ParseError(f"unexpected character {m.group(3)!r}", lineno, m.start(3) + 1)
        tok = m.group(1) or m.group(2)
        out.append((tok, m.start(1 if m.group(1) else 2) + 1))
        pos = m.end()
    return out


class _Line:
    def __init__(self, lineno: int, toks: list[tuple[str, int]]):
        self.lineno = lineno
        self.toks = toks
        self.i = 0

    def error(self, msg: str, at: int | None = None) -> ParseError:
        if at is None:
            at = self.i
        col = self.toks[at][1] if at < len(self.toks) else (self.toks[-1][1] + len(self.toks[-1][0]) if self.toks else 1)
        return ParseError(msg, self.lineno, col)

    def name(self, what: str) -> str:
        if self.i >= len(self.toks):
            raise self.error(f"expected {what}")
        tok = self.toks[self.i][0]
        if not _NAME.match(tok):
            raise self.error(f"expected {what}, got {tok!r}")
        if tok in RESERVED:
            raise self.error(f"reserved word {tok!r} cannot be used as {what}")
        self.i += 1
        return tok

    def expect(self, lit: str):
        if self.i >= len(self.toks) or self.toks[self.i][0] != lit:
            got = self.toks[self.i][0] if self.i < len(self.toks) else "end of line"
            raise self.error(f"expected {lit!r}, got {got!r}")
        self.i += 1

    def done(self):
        if self.i != len(self.toks):
            raise self.error(f"unexpected {self.toks[self.i][0]!r}")

    @property
    def head(self) -> str | None:
        return self.toks[0][0] if self.toks else None


def parse_instance(text: str) -> Acg:
    """Parse the instance text format into an :class:`Acg`.

    Raises :class:`ParseError` (with line/column) on syntax errors and
    :class:`InstanceError` on semantic ones such as unknown variables.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw.split("#", 1)[0], lineno)
        if toks:
            lines.append(_Line(lineno, toks))
    if not lines:
        raise ParseError("empty instance", 1, 1)

    it = iter(lines)
    ln = next(it)
    if ln.head != "instance":
        raise ln.error("expected 'instance'", 0)
    ln.i = 1
    name = ln.name("instance name")
    ln.done()

    flowpoints: list[FlowPoint] = []
    fp_vars: dict[str, tuple[str, ...]] = {}
    initial = None
    graphs: list[SizeChangeGraph] = []
    arity = None
    pending = list(it)
    k = 0
    while k < len(pending):
        ln = pending[k]
        k += 1
        head = ln.head
        ln.i = 1
        if head == "flowpoint":
            if graphs or initial is not None:
                raise ln.error("flow points must be declared before 'initial' and graphs", 0)
            fname = ln.name("flow point name")
            ln.expect("vars")
            vs = []
            while ln.i < len(ln.toks):
                at = ln.i
                v = ln.name("variable name")
                if v in vs:
                    raise ln.error(f"duplicate variable {v!r}", at)
                vs.append(v)
            if not vs:
                raise ln.error("flow point needs at least one variable")
            if fname in fp_vars:
                raise ln.error(f"duplicate flow point {fname!r}", 1)
            if arity is not None and len(vs) != arity:
                raise ln.error(f"flow point {fname!r} has {len(vs)} variables, expected {arity}", 1)
            arity = len(vs)
            fp_vars[fname] = tuple(vs)
            flowpoints.append(FlowPoint(fname, tuple(vs)))
        elif head == "initial":
            if initial is not None or graphs:
                raise ln.error("misplaced 'initial'", 0)
            at = ln.i
            initial = ln.name("flow point name")
            if initial not in fp_vars:
                raise ln.error(f"unknown flow point {initial!r}", at)
            ln.done()
        elif head == "graph":
            if not flowpoints:
                raise ln.error("graph before any flow point", 0)
            at = ln.i
            gid = ln.name("graph name")
            if any(g.id == gid for g in graphs):
                raise ln.error(f"duplicate graph {gid!r}", at)
            ln.expect(":")
            at_src = ln.i
            src = ln.name("flow point name")
            ln.expect("->")
            at_tgt = ln.i
            tgt = ln.name("flow point name")
            ln.done()
            for fpn, pos in ((src, at_src), (tgt, at_tgt)):
                if fpn not in fp_vars:
                    raise ln.error(f"unknown flow point {fpn!r}", pos)
            arcs = []
            closed = False
            while k < len(pending):
                al = pending[k]
                k += 1
                if al.head == "end":
                    al.i = 1
                    al.done()
                    closed = True
                    break
                al.i = 0
                at_x = al.i
                x = al.name("variable name")
                if al.i >= len(al.toks) or al.toks[al.i][0] not in (">", ">="):
                    raise al.error("expected '>' or '>='")
                op = al.toks[al.i][0]
                al.i += 1
                at_y = al.i
                y = al.name("variable name")
                al.done()
                if x not in fp_vars[src]:
                    raise al.error(f"unknown variable {x!r} in flow point {src!r}", at_x)
                if y not in fp_vars[tgt]:
                    raise al.error(f"unknown variable {y!r} in flow point {tgt!r}", at_y)
                arcs.append(Arc(x, y, Label(op)))
            if not closed:
                raise ParseError(f"graph {gid!r} is missing 'end'", pending[-1].lineno)
            graphs.append(SizeChangeGraph(gid, src, tgt, frozenset(arcs)))
        else:
            raise ln.error(f"unexpected {head!r}", 0)

    if not flowpoints:
        raise ParseError("instance declares no flow points")
    if not graphs:
        raise ParseError("instance declares no graphs")
    acg = Acg(name, tuple(flowpoints), initial or flowpoints[0].name, tuple(graphs))
    validate(acg)
    return acg


def load_instance(path) -> Acg:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def serialize_instance(a: Acg) -> str:
    out = [f"instance {a.name}"]
    out += [f"flowpoint {fp.name} vars {' '.join(fp.vars)}" for fp in a.flowpoints]
    out.append(f"initial {a.initial}")
    for g in a.graphs:
        out.append(f"graph {g.id} : {g.source} -> {g.target}")
        out += [f"  {arc}" for arc in g.sorted_arcs()]
        out.append("end")
    return "\n".join(out) + "\n"


def validate(a: Acg) -> Acg:
    """Check that every flow point is reachable from ``a.initial``."""
    seen = set(nx.descendants(cfg_digraph(a), a.initial)) | {a.initial}
    missing = [fp.name for fp in a.flowpoints if fp.name not in seen]
    if missing:
        raise InstanceError(f"flow points not reachable from {a.initial!r}: {missing}")
    return a


# ---------------------------------------------------------------------------
# structure


def cfg_digraph(a: Acg, graphs: Iterable[SizeChangeGraph] | None = None) -> nx.DiGraph:
    """The control-flow graph as a simple digraph over flow point names."""
    cfg = nx.DiGraph()
    cfg.add_nodes_from(fp.name for fp in a.flowpoints)
    cfg.add_edges_from((g.source, g.target) for g in (a.graphs if graphs is None else graphs))
    return cfg


def is_strongly_connected(a: Acg) -> bool:
    return nx.is_strongly_connected(cfg_digraph(a))


def _fanning(graphs: Iterable[SizeChangeGraph], end: str) -> Iterator[SizeChangeGraph]:
    for g in graphs:
        ends = [getattr(arc, end) for arc in g.arcs]
        if len(ends) != len(set(ends)):
            yield g


def fanning_out_graph(graphs: Iterable[SizeChangeGraph]) -> SizeChangeGraph | None:
    """Return the first graph with a fanning-out variable, or ``None``."""
    return next(_fanning(graphs, "source"), None)


def fanning_in_graph(graphs: Iterable[SizeChangeGraph]) -> SizeChangeGraph | None:
    """Return the first graph with a fanning-in variable, or ``None``."""
    return next(_fanning(graphs, "target"), None)


def classify(a: Acg) -> Classification:
    return Classification(
        fan_in_free=fanning_in_graph(a.graphs) is None,
        fan_out_free=fanning_out_graph(a.graphs) is None,
        strict=all(arc.strict for g in a.graphs for arc in g.arcs),
        strongly_connected=is_strongly_connected(a),
    )


def transpose(a: Acg) -> Acg:
    """Reverse every graph (and hence every CFG edge); ``initial`` is kept."""
    return Acg(a.name, a.flowpoints, a.initial, tuple(g.transposed() for g in a.graphs))
