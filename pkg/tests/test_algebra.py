import pytest

from etr.algebra import (
    BinOp,
    Complement,
    Cylinder,
    Filter,
    Join,
    Project,
    Quoted,
    Ref,
    evaluate,
    parse_algebra,
)
from etr.catalog import load_instance
from etr.core import FiniteMap, Signature, iota
from etr.errors import ETRSyntaxError, IncompatiblePattern, SignatureMismatch, UnknownRelation
from etr.relation import Indeterminate, Relation, join, project


def pat(*terms):
    return FiniteMap(zip(iota(len(terms)), [Indeterminate(t) if isinstance(t, str) else t for t in terms]))


def test_parse_join_of_filters():
    assert parse_algebra("pc:[x,y] |x| pc:[y,z]") == Join((
        Filter(Ref("pc"), pat("x", "y")), Filter(Ref("pc"), pat("y", "z"))))


def test_parse_projection():
    inner = Join((Filter(Ref("pc"), pat("x", "y")), Filter(Ref("pc"), pat("y", "z"))))
    assert parse_algebra("project{x,z}(pc:[x,y] |x| pc:[y,z])") == Project(inner, frozenset({"x", "z"}))


def test_parse_square():
    assert parse_algebra("prod:[x,x,z]") == Filter(Ref("prod"), pat("x", "x", "z"))


def test_parse_operators_and_precedence():
    e = parse_algebra("~a |x| b & c + d - e")
    assert e == BinOp("-", BinOp("+", BinOp("&", Join((Complement(Ref("a")), Ref("b"))), Ref("c")), Ref("d")), Ref("e"))
    assert parse_algebra("cyl{k:D}(r)") == Cylinder(Ref("r"), Signature({"k": "D"}))
    assert parse_algebra("r:{parent: x, child: 'mary'}") == Filter(
        Ref("r"), FiniteMap({"parent": Indeterminate("x"), "child": Quoted("mary")}))
    assert parse_algebra("project{}(r)") == Project(Ref("r"), frozenset())
    assert parse_algebra("r:[x,y]:[a,b]") == Filter(Filter(Ref("r"), pat("x", "y")), pat("a", "b"))


@pytest.mark.parametrize("text", ["", "pc:", "pc:[x,", "project{x}(pc", "pc |x|", "(pc", "pc:[1]", "pc:{a:x, a:y}", "pc $"])
def test_parse_errors(text):
    with pytest.raises(ETRSyntaxError):
        parse_algebra(text)


def test_unknown_relation_name():
    with pytest.raises(UnknownRelation):
        parse_algebra("pc |x| qq", {"pc": None})


def test_printing_round_trips():
    for text in ["project{x,z}(pc:[x,y] |x| pc:[y,z])", "~(a + b) & c", "cyl{k:D}(r:{a:x,b:'v'})", "(a |x| b) - c"]:
        e = parse_algebra(text)
        assert parse_algebra(str(e)) == e


@pytest.fixture
def family(fixtures_dir):
    return load_instance(fixtures_dir / "parent_child" / "scheme.yaml", fixtures_dir / "parent_child")


def test_positional_patterns_follow_scheme_order(family):
    r = evaluate(parse_algebra("pc:[x,y]"), family)
    assert r.rows() == sorted([("mary", "john"), ("john", "alan"), ("mary", "joan")])
    named = evaluate(parse_algebra("pc:{parent: x, child: y}"), family)
    assert named == r


def test_ground_terms_select(family):
    r = evaluate(parse_algebra("pc:['mary', y]"), family)
    assert r.rows() == [("joan",), ("john",)]


def test_evaluate_boolean_and_cylinder(family):
    full = evaluate(parse_algebra("cyl{x:person, y:person}(project{}(pc))"), family)
    assert len(full) == 16
    not_pc = evaluate(parse_algebra("~pc:[x,y]"), family)
    assert len(not_pc) == 13
    assert evaluate(parse_algebra("pc:[x,y] + ~pc:[x,y]"), family) == full
    assert len(evaluate(parse_algebra("pc:[x,y] & ~pc:[x,y]"), family)) == 0
    assert evaluate(parse_algebra("pc:[x,y] - pc:[x,y]"), family) == Relation.empty(full.signature)
    with pytest.raises(SignatureMismatch):
        evaluate(parse_algebra("pc:[x,y] + pc:[y,z]"), family)


def test_grandparent_algebra_matches_manual_plan(family):
    pc = family.lookup("pc")
    from etr.relation import rename_to
    manual = project(join(rename_to(pc, {"parent": "x", "child": "y"}), rename_to(pc, {"parent": "y", "child": "z"})),
                     {"x", "z"})
    assert evaluate(parse_algebra("project{x,z}(pc:[x,y] |x| pc:[y,z])"), family) == manual


def test_bad_pattern_arity(family):
    with pytest.raises(IncompatiblePattern):
        evaluate(parse_algebra("pc:[x,y,z]"), family)
