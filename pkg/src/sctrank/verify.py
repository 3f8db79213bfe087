"""Order semantics, evaluation of ranking documents, and the certificate checker.

Values of ranking tuples are tuples of ``int`` (numeric entries) and
:class:`Bag` (multisets of variable values).  Bags of different sizes
compare by size; equal-size bags compare by their sorted listing,
ascending for the ``min`` flavor (dual multiset order) and descending for
``max`` (Dershowitz-Manna multiset order).  Tuples compare
lexicographically, a proper prefix being smaller.

:func:`verify_ranking` checks a document against every graph of an
instance on the value grid ``{0..2n-1}``.  That grid is enough: the
descent condition only involves order comparisons between variable
values (constants are only ever compared with constants), so any
counterexample over the integers collapses onto at most ``2n`` distinct
values.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import IllFormedRanking, InstanceError
from .model import Acg, SizeChangeGraph
from .ranking import Const, MaxVal, MinVal, RankingDoc, RankTuple, VarSet

__all__ = [
    "Ordering",
    "Bag",
    "Value",
    "Valuation",
    "multiset_compare",
    "value_compare",
    "value_key",
    "eval_tuple",
    "eval_ranking",
    "models",
    "order_collapse",
    "Exhaustive",
    "Sampled",
    "Counterexample",
    "VerifyReport",
    "verify_ranking",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 10**8


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _cmp(a, b) -> Ordering:
    return Ordering.LESS if a < b else Ordering.GREATER if a > b else Ordering.EQUAL


@dataclass(frozen=True)
class Bag:
    """A finite multiset of integers, stored in ascending order."""

    items: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(sorted(self.items)))

    def __len__(self) -> int:
        return len(self.items)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.items)) + "}"


ValueEntry = Union[int, Bag]
Value = tuple  # tuple[ValueEntry, ...]


def _bag_key(items: Sequence[int], flavor: str):
    listing = sorted(items, reverse=(flavor == "max"))
    return (len(listing), tuple(listing))


def multiset_compare(a, b, flavor: str) -> Ordering:
    """Compare two integer multisets (any iterables, or :class:`Bag`)."""
    if flavor not in ("min", "max"):
        raise ValueError(f"flavor must be 'min' or 'max', not {flavor!r}")
    a = a.items if isinstance(a, Bag) else tuple(a)
    b = b.items if isinstance(b, Bag) else tuple(b)
    return _cmp(_bag_key(a, flavor), _bag_key(b, flavor))


def _is_bag(e) -> bool:
    return isinstance(e, Bag)


def value_compare(v1: Value, v2: Value, flavor: str) -> Ordering:
    for i, (e1, e2) in enumerate(zip(v1, v2)):
        if _is_bag(e1) != _is_bag(e2):
            raise IllFormedRanking(f"entry kinds differ at index {i}: {e1} vs {e2}")
        c = multiset_compare(e1, e2, flavor) if _is_bag(e1) else _cmp(e1, e2)
        if c:
            return c
    return _cmp(len(v1), len(v2))


def value_key(v: Value, flavor: str):
    """A key whose natural order agrees with :func:`value_compare`.

    Defined for all values; when two values have mismatched kinds the key
    order is arbitrary but fixed, and :func:`value_compare` raises instead.
    """
    return tuple((1, _bag_key(e.items, flavor)) if _is_bag(e) else (0, e) for e in v)


@dataclass(frozen=True)
class Valuation:
    flowpoint: str
    values: Mapping[str, int]

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.values.items())
        return f"{self.flowpoint}[{inner}]"


def eval_tuple(t: RankTuple, values: Mapping[str, int]) -> Value:
    out = []
    for e in t:
        if isinstance(e, Const):
            out.append(e.value)
        elif isinstance(e, VarSet):
            out.append(Bag(tuple(values[x] for x in e.vars)))
        elif isinstance(e, MaxVal):
            out.append(max(values[x] for x in e.vars))
        elif isinstance(e, MinVal):
            out.append(min(values[x] for x in e.vars))
        else:  # pragma: no cover
            raise TypeError(f"not a ranking entry: {e!r}")
    return tuple(out)


def _extreme(vals: list[Value], mode: str) -> Value:
    keyed = sorted(vals, key=lambda v: value_key(v, mode))
    for lo, hi in zip(keyed, keyed[1:]):
        value_compare(lo, hi, mode)  # raises on a kind clash between neighbours
    return keyed[0] if mode == "min" else keyed[-1]


def eval_ranking(doc: RankingDoc, v: Valuation) -> Value:
    """The document's value in state ``(v.flowpoint, v.values)``."""
    tuples = doc.tuples(v.flowpoint)
    try:
        vals = [eval_tuple(t, v.values) for t in tuples]
    except KeyError as exc:
        raise InstanceError(f"valuation lacks variable {exc.args[0]!r}") from None
    return _extreme(vals, doc.mode)


def models(g: SizeChangeGraph, src: Valuation, tgt: Valuation) -> bool:
    """Whether transition ``src -> tgt`` satisfies every arc of ``g``."""
    for arc in g.arcs:
        x, y = src.values[arc.source], tgt.values[arc.target]
        if (x <= y) if arc.strict else (x < y):
            return False
    return True


def order_collapse(src: Valuation, tgt: Valuation) -> tuple[Valuation, Valuation]:
    """Map the values of both stores onto ``0..k-1`` preserving their order."""
    ranks = {v: i for i, v in enumerate(sorted(set(src.values.values()) | set(tgt.values.values())))}
    return (
        Valuation(src.flowpoint, {k: ranks[x] for k, x in src.values.items()}),
        Valuation(tgt.flowpoint, {k: ranks[x] for k, x in tgt.values.items()}),
    )


# ---------------------------------------------------------------------------
# certificate checking


@dataclass(frozen=True)
class Exhaustive:
    cap: int = DEFAULT_CAP
    max_grid: int = 2_000_000


@dataclass(frozen=True)
class Sampled:
    count: int = 100_000
    seed: int = 0


@dataclass(frozen=True)
class Counterexample:
    graph: str
    source: Valuation
    target: Valuation
    source_value: Value
    target_value: Value

    def __str__(self) -> str:
        fmt = lambda v: "<" + ",".join(map(str, v)) + ">"
        return (
            f"graph {self.graph}: {self.source} -> {self.target}; "
            f"rank {fmt(self.source_value)} does not exceed {fmt(self.target_value)}"
        )


@dataclass(frozen=True)
class VerifyReport:
    valid: bool
    counterexample: Counterexample | None
    mode_used: str
    checked: int
    degraded: bool = False


class _Evaluator:
    """Evaluates a document on rows of a value matrix, with caching."""

    def __init__(self, a: Acg, doc: RankingDoc):
        self.doc = doc
        self.vars = {fp.name: fp.vars for fp in a.flowpoints}
        self.cache: dict[tuple[str, tuple[int, ...]], Value] = {}

    def valuation(self, fp: str, row) -> Valuation:
        return Valuation(fp, dict(zip(self.vars[fp], (int(x) for x in row))))

    def value(self, fp: str, row) -> Value:
        key = (fp, tuple(int(x) for x in row))
        if key not in self.cache:
            self.cache[key] = eval_ranking(self.doc, self.valuation(fp, key[1]))
        return self.cache[key]


def _arc_columns(a: Acg, g: SizeChangeGraph):
    sv, tv = a.vars_of(g.source), a.vars_of(g.target)
    return [(sv.index(arc.source), tv.index(arc.target), arc.strict) for arc in g.arcs]


def _modeled(src: np.ndarray, tgt: np.ndarray, cols, pairwise: bool) -> np.ndarray:
    """Boolean mask of modeled pairs: an outer (rows x rows) or a row-wise one."""
    shape = (len(src), len(tgt)) if pairwise else (len(src),)
    mask = np.ones(shape, dtype=bool)
    for i, j, strict in cols:
        x = src[:, i][:, None] if pairwise else src[:, i]
        y = tgt[:, j][None, :] if pairwise else tgt[:, j]
        mask &= (x > y) if strict else (x >= y)
    return mask


def _corners(grid: np.ndarray, cols, width: int):
    """Per source row: the largest modeled target (as a grid index) and the number of modeled targets.

    Rows with no modeled target get count 0.
    """
    n = grid.shape[1]
    ub = np.full(grid.shape, width - 1, dtype=np.int64)
    for i, j, strict in cols:
        ub[:, j] = np.minimum(ub[:, j], grid[:, i] - int(strict))
    ok = (ub >= 0).all(axis=1)
    counts = np.where(ok, np.prod(np.maximum(ub, 0) + 1, axis=1, dtype=np.int64), 0)
    powers = width ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return np.maximum(ub, 0) @ powers, counts


def _ranks(a: Acg, doc: RankingDoc, ev: _Evaluator, grid: np.ndarray) -> dict[str, np.ndarray]:
    # one global rank per distinct value, so cross-flow-point comparisons are integer ones
    values = {fp.name: [ev.value(fp.name, row) for row in grid] for fp in a.flowpoints}
    distinct = {value_key(v, doc.mode): v for vs in values.values() for v in vs}
    keys = sorted(distinct)
    for lo, hi in zip(keys, keys[1:]):
        value_compare(distinct[lo], distinct[hi], doc.mode)
    index = {k: i for i, k in enumerate(keys)}
    return {fp: np.array([index[value_key(v, doc.mode)] for v in vs], dtype=np.int64) for fp, vs in values.items()}


def _exhaustive(a: Acg, doc: RankingDoc, ev: _Evaluator, grid: np.ndarray, corners) -> VerifyReport:
    # Every entry kind is monotone in each variable, so a source row fails
    # iff it fails against its largest modeled target.
    rank = _ranks(a, doc, ev, grid)
    checked = 0
    for g, (top, counts) in zip(a.graphs, corners):
        rs, rt = rank[g.source], rank[g.target]
        bad = (counts > 0) & (rs <= rt[top])
        if not bad.any():
            checked += int(counts.sum())
            continue
        i = int(np.flatnonzero(bad)[0])
        checked += int(counts[: i + 1].sum())
        row = _modeled(grid[i : i + 1], grid, _arc_columns(a, g), pairwise=True)[0]
        j = int(np.flatnonzero(row & (rs[i] <= rt))[0])
        src, tgt = grid[i], grid[j]
        cex = Counterexample(
            g.id, ev.valuation(g.source, src), ev.valuation(g.target, tgt), ev.value(g.source, src), ev.value(g.target, tgt)
        )
        return VerifyReport(False, cex, "exhaustive", checked)
    return VerifyReport(True, None, "exhaustive", checked)


def _sampled(a: Acg, doc: RankingDoc, ev: _Evaluator, budget: Sampled, degraded: bool) -> VerifyReport:
    rng = np.random.default_rng(budget.seed)
    width = 2 * a.n
    checked = 0
    for g in a.graphs:
        cols = _arc_columns(a, g)
        remaining = budget.count
        while remaining > 0:
            batch = min(remaining, 50_000)
            remaining -= batch
            src = rng.integers(0, width, size=(batch, a.n))
            tgt = rng.integers(0, width, size=(batch, a.n))
            for k in np.flatnonzero(_modeled(src, tgt, cols, pairwise=False)):
                checked += 1
                vs, vt = ev.value(g.source, src[k]), ev.value(g.target, tgt[k])
                if value_compare(vs, vt, doc.mode) is not Ordering.GREATER:
                    cex = Counterexample(
                        g.id, ev.valuation(g.source, src[k]), ev.valuation(g.target, tgt[k]), vs, vt
                    )
                    return VerifyReport(False, cex, "sampled", checked, degraded)
    return VerifyReport(True, None, "sampled", checked, degraded)


def verify_ranking(a: Acg, doc: RankingDoc, budget: Exhaustive | Sampled = Exhaustive()) -> VerifyReport:
    """Check that ``doc`` strictly decreases across every graph of ``a``.

    ``Exhaustive`` covers all modeled pairs of stores over ``{0..2n-1}``;
    this is sound and complete.  If some graph models more than ``cap``
    pairs, or the grid has more than ``max_grid`` stores, the check
    degrades to ``Sampled()`` and the report says so.  ``Sampled`` draws
    uniform pairs from the same grid and discards those the graph does not
    model; it can only refute.
    """
    doc.check_against(a)
    ev = _Evaluator(a, doc)
    if isinstance(budget, Sampled):
        return _sampled(a, doc, ev, budget, degraded=False)
    width = 2 * a.n
    rows = width ** a.n
    reason = f"grid of {rows} stores exceeds {budget.max_grid}" if rows > budget.max_grid else None
    if reason is None:
        grid = np.array(list(itertools.product(range(width), repeat=a.n)), dtype=np.int64)
        corners = [_corners(grid, _arc_columns(a, g), width) for g in a.graphs]
        worst = max(int(c.sum()) for _, c in corners)
        if worst > budget.cap:
            reason = f"{worst} modeled pairs in one graph exceed cap {budget.cap}"
    if reason is not None:
        warnings.warn(f"exhaustive check infeasible: {reason}; sampling", RuntimeWarning, stacklevel=2)
        return _sampled(a, doc, ev, Sampled(), degraded=True)
    return _exhaustive(a, doc, ev, grid, corners)
