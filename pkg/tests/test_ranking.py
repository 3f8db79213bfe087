import pytest

from sctrank.errors import InstanceError, ParseError
from sctrank.generators import builtin
from sctrank.ranking import Const, MaxVal, MinVal, RankingDoc, VarSet, parse_ranking, serialize_ranking


def test_parse_entries():
    doc = parse_ranking("ranking r mode max\nf: {<x,0,{y,z}>, <max{x,y},min{z},-1>}\n")
    assert doc.mode == "max"
    assert set(doc.tuples("f")) == {
        (VarSet(("x",)), Const(0), VarSet(("y", "z"))),
        (MaxVal(("x", "y")), MinVal(("z",)), Const(-1)),
    }


def test_canonical_order_and_dedup():
    doc = parse_ranking("ranking sec46 mode min\nf: {<y,4,x,4>, <x,3,y,4>, <y,4,x,4>}\n")
    assert serialize_ranking(doc) == "ranking sec46 mode min\nf: {<x,3,y,4>, <y,4,x,4>}\n"


def test_round_trip():
    text = "ranking t mode min\nf: {<1,x,0,{y,z},8>}\ng: {<max{a,b}>}\n"
    assert serialize_ranking(parse_ranking(text)) == text


def test_varset_is_a_multiset():
    assert VarSet(("y", "x", "x")).vars == ("x", "x", "y")
    assert MaxVal(("y", "x", "x")).vars == ("x", "y")


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("ranking r mode mid\nf: {<x>}\n", 1, 16),
        ("ranking r mode min\nf {<x>}\n", 2, 3),
        ("ranking r mode min\nf: {<x,>}\n", 2, 8),
        ("ranking r mode min\nf: {<x>} extra\n", 2, 10),
        ("ranking r mode min\nf: {<x>}\nf: {<y>}\n", 3, 1),
        ("ranking r mode min\nf: {<x;y>}\n", 2, 7),
    ],
)
def test_parse_errors(text, line, col):
    with pytest.raises(ParseError) as ei:
        parse_ranking(text)
    assert (ei.value.line, ei.value.column) == (line, col)


def test_no_rows_or_empty():
    with pytest.raises(ParseError):
        parse_ranking("ranking r mode min\n")
    with pytest.raises(ParseError):
        parse_ranking("   \n")
    with pytest.raises(InstanceError):
        RankingDoc("r", "min", {"f": []})


def test_check_against():
    a = builtin("sec46")
    parse_ranking("ranking r mode min\nf: {<x>}\n").check_against(a)
    with pytest.raises(InstanceError, match="unknown variable 'w'"):
        parse_ranking("ranking r mode min\nf: {<w>}\n").check_against(a)
    with pytest.raises(InstanceError, match="does not cover"):
        parse_ranking("ranking r mode min\ng: {<x>}\n").check_against(a)
