import json

import pytest
from hypothesis import given, strategies as st

from agcheck.errors import ParseError, UnknownType, ValidationError
from agcheck.model import (
    TOP, Production, RoleSpec, TypeHierarchy, bundle_from_dict, dump_bundle, load_bundle, producers, subtype_of,
)
from agcheck.samples import corpus

SMALL = {
    "types": [{"name": "Int", "parents": ["Object"]}],
    "nonterminals": ["Program", "Expr", "Lit"],
    "modules": [{"name": "m", "productions": [
        {"id": "p0", "lhs": "Program", "rhs": ["Expr"]},
        {"id": "p1", "lhs": "Expr", "rhs": ["Lit"]},
    ]}],
}


def test_load_small_bundle():
    b = load_bundle(json.dumps(SMALL))
    assert len(b.productions) == 2
    assert len(b.nonterminals) == 3
    assert b.start == "Program"


def test_unknown_nonterminal_rejected():
    doc = json.loads(json.dumps(SMALL))
    doc["modules"][0]["productions"][1]["rhs"] = ["Foo"]
    with pytest.raises(ValidationError, match="Foo"):
        bundle_from_dict(doc)


def test_cyclic_hierarchy_rejected():
    with pytest.raises(ValidationError, match="cyclic"):
        TypeHierarchy.from_pairs([("A", ["B"]), ("B", ["A"])])


def test_duplicate_type_rejected():
    with pytest.raises(ValidationError):
        TypeHierarchy.from_pairs([("A", []), ("A", [])])


def test_missing_start_rejected():
    doc = dict(SMALL, start="Main")
    with pytest.raises(ValidationError, match="start"):
        bundle_from_dict(doc)


def test_unknown_keys_rejected():
    with pytest.raises(ParseError, match="unknown key"):
        bundle_from_dict(dict(SMALL, extra=1))
    doc = json.loads(json.dumps(SMALL))
    doc["modules"][0]["productions"][0]["terminals"] = ["+"]
    with pytest.raises(ParseError):
        bundle_from_dict(doc)


def test_json_syntax_error_has_location():
    with pytest.raises(ParseError) as info:
        load_bundle('{"nonterminals": [}')
    assert "line 1" in str(info.value)


def test_subtype_examples():
    h = TypeHierarchy.from_pairs([("Int", []), ("String", []), ("PosInt", ["Int"])])
    assert subtype_of(h, "Int", "Int")
    assert subtype_of(h, "Int", TOP)
    assert not subtype_of(h, "Int", "String")
    assert subtype_of(h, "PosInt", "Int")
    assert not subtype_of(h, "Int", "PosInt")
    with pytest.raises(UnknownType):
        subtype_of(h, "Int", "Nope")
    with pytest.raises(UnknownType):
        subtype_of(h, "Nope", "Int")


def test_producers_and_unproducible(caplog):
    doc = json.loads(json.dumps(SMALL))
    doc["nonterminals"].append("Dead")
    b = bundle_from_dict(doc)
    assert [p.id for p in producers(b, "Expr")] == ["p1"]
    assert [p.id for p in producers(b, "Program")] == ["p0"]
    assert producers(b, "Dead") == ()
    assert "UnproducibleNonterminal" in caplog.text
    assert b.unproducible() == ["Lit", "Dead"]


def test_production_indexing():
    p = Production("p", "Expr", ("Term", "Term"))
    assert p[0] == "Expr" and p[1] == "Term" and p[2] == "Term"
    assert p.arity == 2
    with pytest.raises(IndexError):
        p[3]


def test_role_mode_validated():
    with pytest.raises(ValidationError):
        RoleSpec("r", "inorder")


@st.composite
def hierarchies(draw):
    n = draw(st.integers(1, 8))
    decls = []
    for k in range(n):
        earlier = [f"T{j}" for j in range(k)]
        parents = draw(st.lists(st.sampled_from(earlier), unique=True, max_size=3)) if earlier else []
        decls.append((f"T{k}", parents))
    return TypeHierarchy.from_pairs(decls)


@given(hierarchies(), st.data())
def test_subtype_is_a_partial_order(h, data):
    types = sorted(h.types)
    a, b, c = (data.draw(st.sampled_from(types)) for _ in range(3))
    assert h.subtype_of(a, a)
    assert h.subtype_of(a, TOP)
    if h.subtype_of(a, b) and h.subtype_of(b, c):
        assert h.subtype_of(a, c)
    if h.subtype_of(a, b) and h.subtype_of(b, a):
        assert a == b


@pytest.mark.parametrize("name", sorted(corpus()))
def test_round_trip_on_samples(name):
    b = corpus()[name]
    again = load_bundle(dump_bundle(b))
    assert again == b
    assert dump_bundle(again) == dump_bundle(b)


@given(hierarchies())
def test_round_trip_hierarchy(h):
    doc = {
        "types": [{"name": t, "parents": list(ps)} for t, ps in h.parents.items() if t != TOP],
        "nonterminals": ["Program"],
        "modules": [],
    }
    b = bundle_from_dict(doc)
    assert load_bundle(dump_bundle(b)).hierarchy == b.hierarchy
