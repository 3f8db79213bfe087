"""Composition of size-change graphs, composition closure, SCT decision.

Internally a graph over fixed variable orders is a tuple of
``(any_mask, strict_mask)`` pairs, one per source variable, where bit ``j``
of ``any_mask`` marks an arc to target variable ``j`` and the same bit of
``strict_mask`` says that arc is strict.  Composition and the idempotence
test are then a handful of integer operations.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .errors import BudgetExceeded, InstanceError
from .model import Acg, Arc, Label, SizeChangeGraph

__all__ = [
    "DEFAULT_MAX_ELEMENTS",
    "Variant",
    "ClosureElement",
    "Verdict",
    "compose",
    "identity_graph",
    "closure",
    "decide_sct",
]

DEFAULT_MAX_ELEMENTS = 1_000_000

Masks = tuple[tuple[int, int], ...]


class Variant(enum.Enum):
    IDEMPOTENT_ONLY = "idempotent"
    ALL_GRAPHS = "all-graphs"


def compose(g1: SizeChangeGraph, g2: SizeChangeGraph) -> SizeChangeGraph:
    """``g1 ; g2``: strict wherever some connecting 2-path has a strict leg."""
    if g1.target != g2.source:
        raise InstanceError(
            f"cannot compose {g1.id!r} ({g1.source}->{g1.target}) "
            f"with {g2.id!r} ({g2.source}->{g2.target})"
        )
    out: dict[tuple[str, str], bool] = {}
    for a in g1.arcs:
        for b in g2.arcs:
            if a.target == b.source:
                key = (a.source, b.target)
                out[key] = out.get(key, False) or a.strict or b.strict
    arcs = frozenset(Arc(x, z, Label.STRICT if s else Label.NONSTRICT) for (x, z), s in out.items())
    return SizeChangeGraph(f"{g1.id};{g2.id}", g1.source, g2.target, arcs)


def identity_graph(name: str, vars: Sequence[str], id: str | None = None) -> SizeChangeGraph:
    arcs = frozenset(Arc(x, x, Label.NONSTRICT) for x in vars)
    return SizeChangeGraph(id or f"id_{name}", name, name, arcs)


# ---------------------------------------------------------------------------
# mask representation


def _to_masks(g: SizeChangeGraph, src_vars: Sequence[str], tgt_vars: Sequence[str]) -> Masks:
    col = {y: j for j, y in enumerate(tgt_vars)}
    rows = {x: [0, 0] for x in src_vars}
    for arc in g.arcs:
        bit = 1 << col[arc.target]
        rows[arc.source][0] |= bit
        if arc.strict:
            rows[arc.source][1] |= bit
    return tuple((rows[x][0], rows[x][1]) for x in src_vars)


def _from_masks(masks: Masks, src_vars: Sequence[str], tgt_vars: Sequence[str]) -> frozenset[Arc]:
    arcs = []
    for x, (anym, strictm) in zip(src_vars, masks):
        for j, y in enumerate(tgt_vars):
            bit = 1 << j
            if anym & bit:
                arcs.append(Arc(x, y, Label.STRICT if strictm & bit else Label.NONSTRICT))
    return frozenset(arcs)


def _compose_masks(a: Masks, b: Masks) -> Masks:
    out = []
    for anym, strictm in a:
        any_z = 0
        strict_z = 0
        rest = anym
        while rest:
            low = rest & -rest
            rest ^= low
            b_any, b_strict = b[low.bit_length() - 1]
            any_z |= b_any
            strict_z |= b_any if strictm & low else b_strict
        out.append((any_z, strict_z))
    return tuple(out)


def _has_strict_self_arc(masks: Masks) -> bool:
    return any(strictm >> i & 1 for i, (_, strictm) in enumerate(masks))


def _has_strict_cycle(masks: Masks) -> bool:
    """Whether the arcs of a cyclic graph, read as a digraph, close a cycle through a strict arc."""
    n = len(masks)
    reach = [anym | 1 << i for i, (anym, _) in enumerate(masks)]  # reflexive
    changed = True
    while changed:
        changed = False
        for i in range(n):
            r = reach[i]
            rest = r
            while rest:
                low = rest & -rest
                rest ^= low
                r |= reach[low.bit_length() - 1]
            if r != reach[i]:
                reach[i], changed = r, True
    for i, (_, strictm) in enumerate(masks):
        rest = strictm
        while rest:
            low = rest & -rest
            rest ^= low
            if reach[low.bit_length() - 1] >> i & 1:
                return True
    return False


@dataclass(frozen=True)
class ClosureElement:
    source: str
    target: str
    arcs: frozenset[Arc]
    witness_path: tuple[str, ...]

    def as_graph(self, id: str | None = None) -> SizeChangeGraph:
        return SizeChangeGraph(id or ";".join(self.witness_path), self.source, self.target, self.arcs)

    def has_strict_self_arc(self) -> bool:
        return any(a.strict and a.source == a.target for a in self.arcs)

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in sorted(self.arcs, key=lambda a: (a.source, a.target)))
        return f"{self.source} -> {self.target} {{{body}}} via {' '.join(self.witness_path)}"


@dataclass(frozen=True)
class Verdict:
    terminating: bool
    witness: ClosureElement | None = None
    variant: Variant = Variant.IDEMPOTENT_ONLY
    closure_size: int = 0


class _Closure:
    """Worklist closure over mask-encoded graphs, kept in discovery order."""

    def __init__(self, a: Acg, max_elements: int):
        self.a = a
        self.vars = {fp.name: fp.vars for fp in a.flowpoints}
        self.base = [
            (g, _to_masks(g, self.vars[g.source], self.vars[g.target])) for g in a.graphs
        ]
        self.elements: list[tuple[str, str, Masks, tuple[str, ...]]] = []
        seen: set[tuple[str, str, Masks]] = set()
        queue: deque[int] = deque()

        def add(src, tgt, masks, path):
            key = (src, tgt, masks)
            if key in seen:
                return
            if len(self.elements) >= max_elements:
                raise BudgetExceeded(f"composition closure exceeds {max_elements} elements")
            seen.add(key)
            self.elements.append((src, tgt, masks, path))
            queue.append(len(self.elements) - 1)

        for g, masks in self.base:
            add(g.source, g.target, masks, (g.id,))
        by_source: dict[str, list] = {}
        for g, masks in self.base:
            by_source.setdefault(g.source, []).append((g, masks))
        while queue:
            src, tgt, masks, path = self.elements[queue.popleft()]
            for g, gm in by_source.get(tgt, ()):
                add(src, g.target, _compose_masks(masks, gm), path + (g.id,))

    def element(self, i: int) -> ClosureElement:
        src, tgt, masks, path = self.elements[i]
        return ClosureElement(src, tgt, _from_masks(masks, self.vars[src], self.vars[tgt]), path)


def closure(a: Acg, max_elements: int = DEFAULT_MAX_ELEMENTS) -> list[ClosureElement]:
    """All distinct compositions of CFG paths, in order of discovery.

    Each element keeps the first graph sequence found to produce it.
    Raises :class:`BudgetExceeded` when more than ``max_elements`` distinct
    graphs arise.
    """
    c = _Closure(a, max_elements)
    return [c.element(i) for i in range(len(c.elements))]


def decide_sct(
    a: Acg,
    variant: Variant = Variant.IDEMPOTENT_ONLY,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> Verdict:
    """Decide size-change termination by the closure algorithm.

    With ``IDEMPOTENT_ONLY`` only closure elements ``e`` with ``e;e = e``
    are required to carry a strict self-arc.  With ``ALL_GRAPHS`` every
    cyclic closure element is tested: its arcs, read as a digraph on the
    variables, must close a cycle through a strict arc (for idempotent
    elements this is the same as a strict self-arc).  Both are complete,
    so they always agree on the verdict; they may report different
    witnesses.
    """
    c = _Closure(a, max_elements)
    for i, (src, tgt, masks, _) in enumerate(c.elements):
        if src != tgt:
            continue
        if variant is Variant.IDEMPOTENT_ONLY:
            if _compose_masks(masks, masks) == masks and not _has_strict_self_arc(masks):
                return Verdict(False, c.element(i), variant, len(c.elements))
        elif not _has_strict_cycle(masks):
            return Verdict(False, c.element(i), variant, len(c.elements))
    return Verdict(True, None, variant, len(c.elements))
