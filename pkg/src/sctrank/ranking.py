"""Ranking documents: per-flow-point sets of tuples under a top min or max.

A document assigns each flow point a set of tuples.  A tuple entry is a
constant, a multiset of variables, or the max/min of a set of variables.
The value of a state is the min (``mode="min"``) or max (``mode="max"``) of
its tuples' values; see :mod:`sctrank.verify` for the order semantics.

Text format::

    ranking sec46 mode min
    f: {<x,3,y,4>, <y,4,x,4>}

A bare name abbreviates the singleton set ``{name}``; ``max{x,y}`` and
``min{x,y}`` are scalar entries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import InstanceError, ParseError

__all__ = [
    "Const",
    "VarSet",
    "MaxVal",
    "MinVal",
    "Entry",
    "RankTuple",
    "RankingDoc",
    "entry_key",
    "tuple_key",
    "parse_ranking",
    "serialize_ranking",
    "load_ranking",
]


@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class VarSet:
    """A multiset of variables; evaluates to the multiset of their values."""

    vars: tuple[str, ...]

    def __post_init__(self):
        if not self.vars:
            raise InstanceError("empty variable set in ranking tuple")
        object.__setattr__(self, "vars", tuple(sorted(self.vars)))

    def __len__(self) -> int:
        return len(self.vars)

    def __str__(self) -> str:
        return self.vars[0] if len(self.vars) == 1 else "{" + ",".join(self.vars) + "}"


@dataclass(frozen=True)
class MaxVal:
    vars: tuple[str, ...]

    def __post_init__(self):
        if not self.vars:
            raise InstanceError("empty max{} in ranking tuple")
        object.__setattr__(self, "vars", tuple(sorted(set(self.vars))))

    def __str__(self) -> str:
        return "max{" + ",".join(self.vars) + "}"


@dataclass(frozen=True)
class MinVal:
    vars: tuple[str, ...]

    def __post_init__(self):
        if not self.vars:
            raise InstanceError("empty min{} in ranking tuple")
        object.__setattr__(self, "vars", tuple(sorted(set(self.vars))))

    def __str__(self) -> str:
        return "min{" + ",".join(self.vars) + "}"


Entry = Union[Const, VarSet, MaxVal, MinVal]
RankTuple = tuple  # tuple[Entry, ...]

_KIND_ORDER = {Const: 0, VarSet: 1, MaxVal: 2, MinVal: 3}


def entry_key(e: Entry):
    if isinstance(e, Const):
        return (0, e.value, ())
    return (_KIND_ORDER[type(e)], 0, e.vars)


def tuple_key(t: RankTuple):
    return tuple(entry_key(e) for e in t)


def entry_vars(e: Entry) -> tuple[str, ...]:
    return () if isinstance(e, Const) else e.vars


@dataclass(frozen=True)
class RankingDoc:
    instance: str
    mode: str
    rows: Mapping[str, tuple[RankTuple, ...]]

    def __post_init__(self):
        if self.mode not in ("min", "max"):
            raise InstanceError(f"ranking mode must be 'min' or 'max', not {self.mode!r}")
        rows = {}
        for fp, tuples in self.rows.items():
            canon = sorted({tuple(t) for t in tuples}, key=tuple_key)
            if not canon or any(len(t) == 0 for t in canon):
                raise InstanceError(f"flow point {fp!r} needs at least one non-empty tuple")
            rows[fp] = tuple(canon)
        object.__setattr__(self, "rows", rows)

    def tuples(self, fp: str) -> tuple[RankTuple, ...]:
        try:
            return self.rows[fp]
        except KeyError:
            raise InstanceError(f"ranking does not cover flow point {fp!r}") from None

    def size(self) -> int:
        return sum(len(ts) for ts in self.rows.values())

    def map_tuples(self, fn) -> "RankingDoc":
        return RankingDoc(self.instance, self.mode, {fp: [fn(t) for t in ts] for fp, ts in self.rows.items()})

    def check_against(self, a) -> None:
        """Raise :class:`InstanceError` unless the doc fits instance ``a``."""
        for fp in a.flowpoints:
            if fp.name not in self.rows:
                raise InstanceError(f"ranking does not cover flow point {fp.name!r}")
            known = set(fp.vars)
            for t in self.rows[fp.name]:
                for e in t:
                    bad = [x for x in entry_vars(e) if x not in known]
                    if bad:
                        raise InstanceError(f"flow point {fp.name!r}: unknown variable {bad[0]!r}")
        extra = set(self.rows) - {fp.name for fp in a.flowpoints}
        if extra:
            raise InstanceError(f"ranking names unknown flow points {sorted(extra)}")

    def __str__(self) -> str:
        return serialize_ranking(self)


def _fmt_tuple(t: RankTuple) -> str:
    return "<" + ",".join(str(e) for e in t) + ">"


def serialize_ranking(doc: RankingDoc) -> str:
    lines = [f"ranking {doc.instance} mode {doc.mode}"]
    for fp, tuples in doc.rows.items():
        lines.append(f"{fp}: {{" + ", ".join(_fmt_tuple(t) for t in tuples) + "}")
    return "\n".join(lines) + "\n"


_RTOKEN = re.compile(r"\s*(?:((?:max|min)\{)|(-?\d+)|([A-Za-z_][A-Za-z0-9_]*)|([<>{},:])|(\S))")


class _Cursor:
    def __init__(self, text: str, lineno: int):
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _RTOKEN.match(text, pos)
            if m is None:
                break
            if m.group(5):
                raise ParseError(f"unexpected character {m.group(5)!r}", lineno, m.start(5) + 1)
            for kind, g in (("op", 1), ("int", 2), ("name", 3), ("op", 4)):
                if m.group(g) is not None:
                    self.toks.append((kind, m.group(g), m.start(g) + 1))
                    break
            pos = m.end()
        self.i = 0
        self.lineno = lineno
        self.end_col = len(text) + 1

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eol", "end of line", self.end_col)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r}, got {tok[1]!r}", self.lineno, tok[2])
        self.i += 1
        return tok[1]

    def names(self) -> list[str]:
        out = [self.take("name")]
        while self.peek()[1] == ",":
            self.take(value=",")
            out.append(self.take("name"))
        self.take(value="}")
        return out


def _entry(cur: _Cursor) -> Entry:
    kind, val, col = cur.peek()
    if kind == "int":
        cur.take()
        return Const(int(val))
    if kind == "name":
        cur.take()
        return VarSet((val,))
    if val == "{":
        cur.take()
        return VarSet(tuple(cur.names()))
    if val == "max{":
        cur.take()
        return MaxVal(tuple(cur.names()))
    if val == "min{":
        cur.take()
        return MinVal(tuple(cur.names()))
    raise ParseError(f"expected a tuple entry, got {val!r}", cur.lineno, col)


def parse_ranking(text: str) -> RankingDoc:
    lines = [(i, ln.split("#", 1)[0]) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln.strip()]
    if not lines:
        raise ParseError("empty ranking document", 1, 1)
    lineno, head = lines[0]
    cur = _Cursor(head, lineno)
    cur.take("name", "ranking")
    name = cur.take("name")
    cur.take("name", "mode")
    mode = cur.take("name")
    if mode not in ("min", "max"):
        raise ParseError(f"mode must be 'min' or 'max', got {mode!r}", lineno, cur.toks[cur.i - 1][2])
    cur.take("eol")
    rows: dict[str, list] = {}
    for lineno, text_line in lines[1:]:
        cur = _Cursor(text_line, lineno)
        col = cur.peek()[2]
        fp = cur.take("name")
        if fp in rows:
            raise ParseError(f"duplicate flow point {fp!r}", lineno, col)
        cur.take(value=":")
        cur.take(value="{")
        tuples = []
        while True:
            cur.take(value="<")
            entries = [_entry(cur)]
            while cur.peek()[1] == ",":
                cur.take()
                entries.append(_entry(cur))
            cur.take(value=">")
            tuples.append(tuple(entries))
            if cur.peek()[1] == ",":
                cur.take()
                continue
            break
        cur.take(value="}")
        cur.take("eol")
        rows[fp] = tuples
    if not rows:
        raise ParseError("ranking document has no flow point lines", lines[0][0])
    return RankingDoc(name, mode, rows)


def load_ranking(path) -> RankingDoc:
    with open(path, encoding="utf-8") as fh:
        return parse_ranking(fh.read())

