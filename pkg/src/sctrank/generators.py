"""Built-in instances, the lower-bound families, and random instances."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from importlib import resources

from .decide import decide_sct
from .errors import BudgetExceeded, GenerationError, InstanceError
from .model import Acg, Arc, FlowPoint, Label, SizeChangeGraph, parse_instance, transpose, validate
from .ranking import Const, RankingDoc, VarSet

__all__ = [
    "BUILTINS",
    "builtin",
    "builtin_text",
    "family_61",
    "family_62",
    "family_63",
    "k_ranking",
    "RandomParams",
    "gen_random",
    "gen_random_fanin",
]

BUILTINS = ("fig3", "fig5", "fig6", "sec46", "sec46_counter")

GE, GT = Label.NONSTRICT, Label.STRICT


def builtin_text(name: str) -> str:
    if name not in BUILTINS:
        raise InstanceError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")
    return resources.files("sctrank").joinpath("data").joinpath(f"{name}.sct").read_text(encoding="utf-8")


def builtin(name: str) -> Acg:
    return parse_instance(builtin_text(name))


def _single(name: str, vars: list[str], graphs: list[tuple[str, list[Arc]]]) -> Acg:
    fp = FlowPoint("f", tuple(vars))
    return Acg(name, (fp,), "f", tuple(SizeChangeGraph(gid, "f", "f", frozenset(arcs)) for gid, arcs in graphs))


def _swap(n: int, k: int) -> list[Arc]:
    # x_k <-> x_{k+1} non-strict, identity elsewhere on x_1..x_n, strict x_0
    arcs = [Arc("x0", "x0", GT), Arc(f"x{k}", f"x{k + 1}", GE), Arc(f"x{k + 1}", f"x{k}", GE)]
    arcs += [Arc(f"x{i}", f"x{i}", GE) for i in range(1, n + 1) if i not in (k, k + 1)]
    return arcs


def family_61(n: int) -> Acg:
    """Transpositions ``G_1..G_{n-1}`` plus ``G_n`` (strict on ``x_n``, drops ``x_0``).

    At ``n = 1`` there are no transpositions and only ``G_1 = {x1 > x1}`` remains.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    vars = [f"x{i}" for i in range(n + 1)]
    graphs = [(f"G{k}", _swap(n, k)) for k in range(1, n)]
    last = [Arc(f"x{i}", f"x{i}", GE) for i in range(1, n)] + [Arc(f"x{n}", f"x{n}", GT)]
    graphs.append((f"G{n}", last))
    return _single(f"c61_{n}", vars, graphs)


def family_62(n: int) -> Acg:
    """Transpositions ``G_1..G_{n-1}`` plus ``H_1..H_n``; ``2n - 1`` graphs."""
    if n < 1:
        raise ValueError("n must be at least 1")
    vars = [f"x{i}" for i in range(n + 1)]
    graphs = [(f"G{k}", _swap(n, k)) for k in range(1, n)]
    for i in range(1, n + 1):
        arcs = [Arc(f"x{j}", f"x{j}", GE) for j in range(1, i)]
        arcs += [Arc(f"x{j}", f"x{i}", GT) for j in range(i, n + 1)]
        graphs.append((f"H{i}", arcs))
    return _single(f"c62_{n}", vars, graphs)


def _pair_identity(n: int, skip: set[int]) -> list[Arc]:
    return [Arc(f"{v}{i}", f"{v}{i}", GE) for i in range(1, n + 1) if i not in skip for v in "xy"]


def family_63(n: int) -> Acg:
    """``2n + 1`` variables and ``n + 1`` graphs: pair swaps ``G_k``, then ``Hx`` and ``Hy``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    vars = ["x0"] + [f"{v}{i}" for i in range(1, n + 1) for v in "xy"]
    graphs = []
    for k in range(1, n):
        arcs = [Arc("x0", "x0", GT)] + _pair_identity(n, {k, k + 1})
        for v in "xy":
            arcs += [Arc(f"{v}{k}", f"{v}{k + 1}", GE), Arc(f"{v}{k + 1}", f"{v}{k}", GE)]
        graphs.append((f"G{k}", arcs))
    hx = [Arc("x1", "x1", GE), Arc("y1", "x1", GE), Arc("x0", "x0", GT)] + _pair_identity(n, {1})
    hy = [Arc("x1", "y1", GT), Arc("y1", "y1", GT)] + _pair_identity(n, {1})
    graphs += [("Hx", hx), ("Hy", hy)]
    return _single(f"c63_{n}", vars, graphs)


def k_ranking(n: int) -> RankingDoc:
    """``min`` over ``<S, c, {x0}, 0>``: one variable per pair, ``c`` counts the y's."""
    if n < 1:
        raise ValueError("n must be at least 1")
    tuples = []
    for pick in itertools.product("xy", repeat=n):
        s = VarSet(tuple(f"{v}{i}" for i, v in enumerate(pick, 1)))
        tuples.append((s, Const(pick.count("y")), VarSet(("x0",)), Const(0)))
    return RankingDoc(f"c63_{n}", "min", {"f": tuples})


# ---------------------------------------------------------------------------
# random instances


@dataclass(frozen=True)
class RandomParams:
    """Knobs for :func:`gen_random`.

    ``arc_prob`` is the chance that a variable gets an arc at all (free
    case: per variable pair, scaled by ``1/n``); ``strongly_connected``
    lays a cycle through all flow points before drawing the rest.
    """

    n: int = 2
    m: int = 1
    graphs: int = 2
    strict_prob: Fraction | float = Fraction(1, 2)
    fan_out_free: bool = False
    fan_in_free: bool = False
    require_terminating: bool = False
    seed: int = 0
    strongly_connected: bool = True
    arc_prob: float = 0.7
    max_retries: int = 10_000

    def check(self) -> None:
        if not 1 <= self.n <= 8:
            raise GenerationError(f"n must be in 1..8, got {self.n}")
        if not 1 <= self.m <= 4:
            raise GenerationError(f"m must be in 1..4, got {self.m}")
        if not 1 <= self.graphs <= 8:
            raise GenerationError(f"graphs must be in 1..8, got {self.graphs}")
        if not 0 <= self.strict_prob <= 1 or not 0 <= self.arc_prob <= 1:
            raise GenerationError("probabilities must lie in [0, 1]")
        if self.strongly_connected and self.graphs < self.m:
            raise GenerationError(f"a strongly connected CFG over {self.m} points needs at least {self.m} graphs")
        if not 0 <= self.seed < 2**64:
            raise GenerationError("seed must be a 64-bit unsigned integer")


def _draw_arcs(rng: random.Random, vars: list[str], p: RandomParams) -> list[tuple[str, str]]:
    n = len(vars)
    if p.fan_out_free and p.fan_in_free:
        targets = rng.sample(vars, n)
        return [(x, y) for x, y in zip(vars, targets) if rng.random() < p.arc_prob]
    if p.fan_out_free:
        return [(x, rng.choice(vars)) for x in vars if rng.random() < p.arc_prob]
    if p.fan_in_free:
        return [(rng.choice(vars), y) for y in vars if rng.random() < p.arc_prob]
    q = min(1.0, 2 * p.arc_prob / n)
    return [(x, y) for x in vars for y in vars if rng.random() < q]


def _attempt(rng: random.Random, p: RandomParams, name: str) -> Acg:
    vars = [f"x{i}" for i in range(p.n)]
    names = [f"f{i}" for i in range(p.m)]
    ends = []
    if p.strongly_connected:
        ends = [(names[i], names[(i + 1) % p.m]) for i in range(p.m)]
    while len(ends) < p.graphs:
        ends.append((rng.choice(names), rng.choice(names)))
    graphs = []
    for k, (src, tgt) in enumerate(ends, 1):
        arcs = frozenset(
            Arc(x, y, GT if rng.random() < p.strict_prob else GE) for x, y in _draw_arcs(rng, vars, p)
        )
        graphs.append(SizeChangeGraph(f"g{k}", src, tgt, arcs))
    return Acg(name, tuple(FlowPoint(f, tuple(vars)) for f in names), names[0], tuple(graphs))


def gen_random(p: RandomParams, name: str | None = None) -> Acg:
    """A seeded random instance honoring the flags of ``p``.

    Draws are repeated (from the same seeded stream) until the instance
    is valid and, if requested, terminating; :class:`GenerationError`
    after ``p.max_retries`` failures.
    """
    p.check()
    rng = random.Random(p.seed)
    name = name or f"random_{p.seed}"
    for _ in range(p.max_retries):
        a = _attempt(rng, p, name)
        try:
            validate(a)
        except InstanceError:
            continue
        if p.require_terminating:
            try:
                if not decide_sct(a).terminating:
                    continue
            except BudgetExceeded:
                continue
        return a
    raise GenerationError(f"no acceptable instance after {p.max_retries} draws")


def gen_random_fanin(p: RandomParams, name: str | None = None) -> Acg:
    """A fan-in free instance obtained by transposing a fan-out free draw."""
    base = gen_random(replace(p, fan_out_free=True, fan_in_free=False), name)
    return transpose(base)
