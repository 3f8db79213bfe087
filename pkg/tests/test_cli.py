import io

import pytest

from sctrank.cli import main
from sctrank.generators import family_61, k_ranking
from sctrank.model import parse_instance, serialize_instance
from sctrank.ranking import parse_ranking

SEC46_RANK = "ranking sec46 mode min\nf: {<x,3,y,4>, <y,4,x,4>}\n"
SWAP = "instance swap\nflowpoint f vars x y\ngraph g : f -> f\n  x >= y\n  y >= x\nend\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_decide(capsys, tmp_path):
    assert run(capsys, "decide", "builtin:sec46")[:2] == (0, "terminating\n")
    p = tmp_path / "swap.sct"
    p.write_text(SWAP)
    code, out, _ = run(capsys, "decide", str(p), "--witness")
    assert code == 1
    assert out.splitlines()[0] == "non-terminating"
    assert "witness: f -> f {x >= x, y >= y}" in out and "path: g g" in out
    assert run(capsys, "decide", str(tmp_path / "missing.sct"))[0] == 2
    assert run(capsys, "decide", "builtin:sec46", "--all-graphs")[0] == 0


def test_decide_budget(capsys):
    code, _, err = run(capsys, "decide", "builtin:fig3", "--max-elements", "2")
    assert code == 3 and "error" in err


def test_decide_machine(capsys):
    code, out, _ = run(capsys, "decide", "builtin:fig6", "--machine")
    assert code == 1
    recs = dict(line.split("=", 1) for line in out.splitlines())
    assert recs["verdict"] == "non-terminating" and recs["witness_path"] == "G2"


def test_rank_sec46_golden(capsys):
    code, out, _ = run(capsys, "rank", "builtin:sec46")
    assert code == 0 and out == SEC46_RANK


def test_rank_errors(capsys):
    code, _, err = run(capsys, "rank", "builtin:fig5")
    assert code == 2 and "G" in err
    code, _, err = run(capsys, "rank", "builtin:fig6")
    assert code == 1 and "witness" in err
    assert run(capsys, "rank", "builtin:sec46", "--mode", "fanin")[0] == 2


def test_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(serialize_instance(family_61(2))))
    assert run(capsys, "decide", "-")[0] == 0


def _rank_and_verify(capsys, tmp_path, inst_arg, *flags):
    out = tmp_path / "r.rank"
    code, _, err = run(capsys, "rank", inst_arg, "--out", str(out), *flags)
    assert code == 0, err
    code, text, err = run(capsys, "verify", inst_arg, "--ranking", str(out))
    assert code == 0, (text, err)
    return out.read_text()


@pytest.mark.parametrize("name", ["sec46", "sec46_counter", "fig3"])
def test_rank_then_verify_builtins(capsys, tmp_path, name):
    _rank_and_verify(capsys, tmp_path, f"builtin:{name}")
    _rank_and_verify(capsys, tmp_path, f"builtin:{name}", "--no-simplify")


def test_rank_fanin_fig3(capsys, tmp_path):
    text = _rank_and_verify(capsys, tmp_path, "builtin:fig3", "--mode", "fanin")
    assert parse_ranking(text).mode == "max"


@pytest.mark.parametrize("fam, n", [("c61", 1), ("c61", 2), ("c62", 2), ("c63", 1)])
def test_rank_then_verify_families(capsys, tmp_path, fam, n):
    p = tmp_path / "i.sct"
    assert run(capsys, "gen", fam, "--n", str(n), "--out", str(p))[0] == 0
    _rank_and_verify(capsys, tmp_path, str(p))


def test_rank_machine(capsys, tmp_path):
    out = tmp_path / "r.rank"
    code, text, _ = run(capsys, "rank", "builtin:sec46", "--machine", "--out", str(out))
    assert code == 0
    assert text.splitlines() == ["status=ok", "mode=min", "tuples=2", "tuple=f: {<x,3,y,4>, <y,4,x,4>}", f"out={out}"]
    assert out.read_text() == SEC46_RANK


def test_verify_known_and_mutated(capsys, tmp_path):
    assert run(capsys, "gen", "fig3", "--with-ranking", "--out", str(tmp_path / "fig3.sct"))[0] == 0
    code, out, _ = run(capsys, "verify", str(tmp_path / "fig3.sct"), "--ranking", str(tmp_path / "fig3.rank"))
    assert code == 0 and out.startswith("valid (exhaustive")
    bad = tmp_path / "bad.rank"
    bad.write_text("ranking fig3 mode max\nf: {<y,0,z>, <x,0,z>}\n")
    code, out, _ = run(capsys, "verify", "builtin:fig3", "--ranking", str(bad))
    assert code == 1 and out.startswith("invalid: graph ")
    code, out, _ = run(capsys, "verify", "builtin:fig3", "--ranking", str(bad), "--machine")
    recs = dict(line.split("=", 1) for line in out.splitlines())
    assert code == 1 and recs["valid"] == "false" and {"graph", "source", "target"} <= set(recs)


def test_verify_errors(capsys, tmp_path):
    missing = tmp_path / "m.rank"
    missing.write_text("ranking x mode min\ng: {<x>}\n")
    assert run(capsys, "verify", "builtin:sec46", "--ranking", str(missing))[0] == 2
    junk = tmp_path / "j.rank"
    junk.write_text("nonsense\n")
    assert run(capsys, "verify", "builtin:sec46", "--ranking", str(junk))[0] == 2


def test_verify_budget_and_samples(capsys, tmp_path):
    r = tmp_path / "k.rank"
    r.write_text(str(k_ranking(2)))
    i = tmp_path / "k.sct"
    assert run(capsys, "gen", "c63", "--n", "2", "--out", str(i))[0] == 0
    code, _, err = run(capsys, "verify", str(i), "--ranking", str(r))
    assert code == 3 and "--samples" in err
    assert run(capsys, "verify", str(i), "--ranking", str(r), "--samples", "2000", "--seed", "4")[0] == 0
    assert run(capsys, "verify", str(i), "--ranking", str(r), "--cap", str(10**10))[0] == 0


def test_gen_round_trip_and_ranking(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "c61", "--n", "3")
    assert code == 0 and parse_instance(out) == family_61(3)
    p = tmp_path / "c63.sct"
    assert run(capsys, "gen", "c63", "--n", "2", "--with-ranking", "--out", str(p))[0] == 0
    doc = parse_ranking((tmp_path / "c63.rank").read_text())
    assert doc.size() == 4
    code, out, _ = run(capsys, "gen", "fig5", "--with-ranking")
    assert code == 0 and "ranking fig5 mode min" in out


def test_gen_errors(capsys):
    assert run(capsys, "gen", "c61")[0] == 2
    assert run(capsys, "gen", "c62", "--n", "0")[0] == 2
    assert run(capsys, "gen", "sec46", "--with-ranking")[0] == 2
    assert run(capsys, "gen", "random", "--vars", "0")[0] == 2
    assert run(capsys, "gen", "random", "--strict-prob", "lots")[0] == 2
    with pytest.raises(SystemExit):
        main(["gen", "c99"])


def test_determinism(capsys):
    argv = ["gen", "random", "--seed", "7", "--vars", "3", "--points", "2", "--graphs", "4",
            "--fan-out-free", "--terminating"]
    first = run(capsys, *argv)
    assert first == run(capsys, *argv) and first[0] == 0
    a, b = (run(capsys, "rank", "builtin:sec46_counter")[1] for _ in range(2))
    assert a == b


def test_random_gen_ranks(capsys, tmp_path):
    p = tmp_path / "r.sct"
    argv = ["gen", "random", "--seed", "3", "--vars", "2", "--points", "2", "--graphs", "3",
            "--fan-out-free", "--terminating", "--out", str(p)]
    assert run(capsys, *argv)[0] == 0
    _rank_and_verify(capsys, tmp_path, str(p))


def test_info(capsys, tmp_path):
    code, out, _ = run(capsys, "info", "builtin:sec46")
    recs = dict(line.split("=", 1) for line in out.splitlines())
    assert code == 0
    assert (recs["m"], recs["n"], recs["graphs"], recs["fan_out_free"]) == ("1", "2", "2", "true")
    assert recs["mtp_size"] == "2" and recs["sccs"] == "1"
    recs = dict(line.split("=", 1) for line in run(capsys, "info", "builtin:fig5")[1].splitlines())
    assert recs["strict"] == "true"
    empty = tmp_path / "e.sct"
    empty.write_text("")
    assert run(capsys, "info", str(empty))[0] == 2
