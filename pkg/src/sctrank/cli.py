"""Command-line interface: ``sctrank {decide,rank,verify,gen,info}``.

Instance arguments are file paths, ``-`` for standard input, or
``builtin:NAME`` for a bundled instance.  Exit codes: 0 success, 1
negative result (non-terminating, invalid ranking), 2 usage, parse or
classification error, 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import enum
import sys
import warnings
from fractions import Fraction
from importlib import resources
from pathlib import Path

import networkx as nx

from . import generators as gen
from .decide import DEFAULT_MAX_ELEMENTS, Variant, closure, decide_sct
from .errors import BudgetExceeded, ClassificationError, NonTerminatingError, SctError
from .model import Acg, classify, cfg_digraph, is_strongly_connected, parse_instance, serialize_instance
from .preserver import compute_mtp
from .rankgen import synthesize, synthesize_fanin, synthesize_fanout
from .ranking import RankingDoc, parse_ranking, serialize_ranking
from .verify import DEFAULT_CAP, Exhaustive, Sampled, VerifyReport, verify_ranking


class ExitCode(enum.IntEnum):
    OK = 0
    NEGATIVE = 1
    ERROR = 2
    BUDGET = 3


class _Fail(Exception):
    def __init__(self, code: ExitCode, message: str):
        super().__init__(message)
        self.code = code


def _read(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if arg.startswith("builtin:"):
        return gen.builtin_text(arg.split(":", 1)[1])
    try:
        return Path(arg).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(ExitCode.ERROR, f"{arg}: {exc.strerror or exc}") from None


def _instance(arg: str) -> Acg:
    text = _read(arg)
    try:
        return parse_instance(text)
    except SctError as exc:
        raise _Fail(ExitCode.ERROR, f"{arg}: {exc}") from None


def _ranking(arg: str) -> RankingDoc:
    text = _read(arg)
    try:
        return parse_ranking(text)
    except SctError as exc:
        raise _Fail(ExitCode.ERROR, f"{arg}: {exc}") from None


def _flag(b: bool) -> str:
    return "true" if b else "false"


def _emit(records: list[tuple[str, object]]) -> None:
    for k, v in records:
        print(f"{k}={v}")


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_decide(args) -> ExitCode:
    a = _instance(args.file)
    variant = Variant.ALL_GRAPHS if args.all_graphs else Variant.IDEMPOTENT_ONLY
    try:
        v = decide_sct(a, variant, args.max_elements)
    except BudgetExceeded as exc:
        raise _Fail(ExitCode.BUDGET, str(exc)) from None
    if args.machine:
        recs = [("verdict", "terminating" if v.terminating else "non-terminating"),
                ("variant", variant.value), ("closure_size", v.closure_size)]
        if v.witness is not None:
            recs += [("witness", v.witness.as_graph()), ("witness_path", " ".join(v.witness.witness_path))]
        _emit(recs)
    else:
        print("terminating" if v.terminating else "non-terminating")
        if args.witness and v.witness is not None:
            w = v.witness
            arcs = ", ".join(str(x) for x in sorted(w.arcs, key=lambda x: (x.source, x.target)))
            print(f"witness: {w.source} -> {w.target} {{{arcs}}}")
            print(f"path: {' '.join(w.witness_path)}")
    return ExitCode.OK if v.terminating else ExitCode.NEGATIVE


def rank_instance(a: Acg, mode: str = "auto", simplify: bool = True) -> RankingDoc:
    """Strongly connected instances get an unprefixed ranking; others go per component."""
    if not is_strongly_connected(a):
        return synthesize(a, mode, simplify)
    c = classify(a)
    if mode == "auto":
        mode = "fanout" if c.fan_out_free else "fanin" if c.fan_in_free else "auto"
    if mode == "auto":
        return synthesize(a, mode, simplify)  # raises, naming the offending graphs
    return (synthesize_fanout if mode == "fanout" else synthesize_fanin)(a, simplify)


def cmd_rank(args) -> ExitCode:
    a = _instance(args.file)
    try:
        doc = rank_instance(a, args.mode, not args.no_simplify)
    except ClassificationError as exc:
        raise _Fail(ExitCode.ERROR, str(exc)) from None
    except NonTerminatingError as exc:
        raise _Fail(ExitCode.NEGATIVE, str(exc)) from None
    except BudgetExceeded as exc:
        raise _Fail(ExitCode.BUDGET, str(exc)) from None
    text = serialize_ranking(doc)
    if args.machine:
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        recs = [("status", "ok"), ("mode", doc.mode), ("tuples", doc.size())]
        recs += [("tuple", line) for line in text.splitlines()[1:]]
        if args.out:
            recs.append(("out", args.out))
        _emit(recs)
    else:
        _write(text, args.out)
    return ExitCode.OK


def _fmt_value(v) -> str:
    return "<" + ",".join(map(str, v)) + ">"


def cmd_verify(args) -> ExitCode:
    a = _instance(args.file)
    doc = _ranking(args.ranking)
    budget = Sampled(args.samples, args.seed) if args.samples is not None else Exhaustive(args.cap)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rep: VerifyReport = verify_ranking(a, doc, budget)
    except SctError as exc:
        raise _Fail(ExitCode.ERROR, str(exc)) from None
    cex = rep.counterexample
    if args.machine:
        recs = [("valid", _flag(rep.valid)), ("mode", rep.mode_used), ("checked", rep.checked),
                ("degraded", _flag(rep.degraded))]
        if cex is not None:
            recs += [("graph", cex.graph), ("source", cex.source), ("target", cex.target),
                     ("source_value", _fmt_value(cex.source_value)),
                     ("target_value", _fmt_value(cex.target_value))]
        _emit(recs)
    elif rep.valid:
        print(f"valid ({rep.mode_used}, {rep.checked} modeled pairs checked)")
    else:
        print(f"invalid: {cex}")
    if not rep.valid:
        return ExitCode.NEGATIVE
    if rep.degraded:
        print(f"error: exhaustive check exceeds the budget (cap {args.cap}); result is from sampling only, use --samples",
              file=sys.stderr)
        return ExitCode.BUDGET
    return ExitCode.OK


_RANKED = ("fig3", "fig5")


def cmd_gen(args) -> ExitCode:
    fam = args.family
    ranking = None
    if fam in ("c61", "c62", "c63"):
        if args.n is None or args.n < 1:
            raise _Fail(ExitCode.ERROR, f"{fam} needs --n N with N >= 1")
        a = {"c61": gen.family_61, "c62": gen.family_62, "c63": gen.family_63}[fam](args.n)
        text = serialize_instance(a)
        if args.with_ranking:
            if fam != "c63":
                raise _Fail(ExitCode.ERROR, "--with-ranking is available for c63, fig3 and fig5")
            ranking = serialize_ranking(gen.k_ranking(args.n))
    elif fam == "random":
        p = gen.RandomParams(
            n=args.vars, m=args.points, graphs=args.graphs, strict_prob=Fraction(args.strict_prob),
            fan_out_free=args.fan_out_free, fan_in_free=args.fan_in_free,
            require_terminating=args.terminating, seed=args.seed,
            strongly_connected=not args.not_connected, arc_prob=args.arc_prob,
        )
        if args.with_ranking:
            raise _Fail(ExitCode.ERROR, "--with-ranking is available for c63, fig3 and fig5")
        try:
            text = serialize_instance(gen.gen_random(p))
        except SctError as exc:
            raise _Fail(ExitCode.ERROR, str(exc)) from None
    else:
        text = serialize_instance(gen.builtin(fam))
        if args.with_ranking:
            if fam not in _RANKED:
                raise _Fail(ExitCode.ERROR, "--with-ranking is available for c63, fig3 and fig5")
            ranking = resources.files("sctrank").joinpath("data").joinpath(f"{fam}.rank").read_text(encoding="utf-8")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        if ranking is not None:
            rpath = Path(args.out).with_suffix(".rank")
            rpath.write_text(ranking, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if ranking is not None:
            sys.stdout.write("\n" + ranking)
    return ExitCode.OK


def cmd_info(args) -> ExitCode:
    a = _instance(args.file)
    c = classify(a)
    sccs = nx.number_strongly_connected_components(cfg_digraph(a))
    try:
        csize = len(closure(a, args.max_elements))
    except BudgetExceeded:
        csize = "over-budget"
    _emit([
        ("name", a.name), ("m", a.m), ("n", a.n), ("graphs", len(a.graphs)),
        ("fan_in_free", _flag(c.fan_in_free)), ("fan_out_free", _flag(c.fan_out_free)),
        ("strict", _flag(c.strict)), ("strongly_connected", _flag(c.strongly_connected)),
        ("sccs", sccs), ("mtp_size", len(compute_mtp(a))), ("closure_size", csize),
    ])
    return ExitCode.OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sctrank", description="Size-change termination and ranking functions.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(fn=fn)
        p.add_argument("--machine", action="store_true", help="key=value output, one record per line")
        return p

    p = add("decide", cmd_decide, "decide size-change termination")
    p.add_argument("file")
    p.add_argument("--all-graphs", action="store_true", help="test every cyclic closure element")
    p.add_argument("--witness", action="store_true", help="print the witness of non-termination")
    p.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS)

    p = add("rank", cmd_rank, "synthesize a ranking function")
    p.add_argument("file")
    p.add_argument("--mode", choices=["auto", "fanout", "fanin"], default="auto")
    p.add_argument("--no-simplify", action="store_true", help="keep multi-variable sets")
    p.add_argument("--out", help="write the ranking document here")

    p = add("verify", cmd_verify, "check a ranking document against an instance")
    p.add_argument("file")
    p.add_argument("--ranking", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true", help="enumerate the full grid (default)")
    g.add_argument("--samples", type=int, help="check N random pairs instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="most modeled pairs per graph for an exhaustive check")

    p = add("gen", cmd_gen, "write a built-in or generated instance")
    p.add_argument("family", choices=["c61", "c62", "c63", *gen.BUILTINS, "random"])
    p.add_argument("--n", type=int, help="family size parameter")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--with-ranking", action="store_true", help="also write the known ranking (c63, fig3, fig5)")
    p.add_argument("--vars", type=int, default=2, help="random: variables per flow point")
    p.add_argument("--points", type=int, default=1, help="random: flow points")
    p.add_argument("--graphs", type=int, default=2, help="random: size-change graphs")
    p.add_argument("--strict-prob", default="1/2", help="random: probability an arc is strict")
    p.add_argument("--arc-prob", type=float, default=0.7, help="random: arc density")
    p.add_argument("--fan-out-free", action="store_true")
    p.add_argument("--fan-in-free", action="store_true")
    p.add_argument("--terminating", action="store_true", help="random: reject non-terminating draws")
    p.add_argument("--not-connected", action="store_true", help="random: do not force strong connectivity")

    p = add("info", cmd_info, "summarize an instance")
    p.add_argument("file")
    p.add_argument("--max-elements", type=int, default=100_000)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return int(args.fn(args))
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(exc.code)
    except (ValueError, SctError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(ExitCode.ERROR)


if __name__ == "__main__":
    sys.exit(main())
