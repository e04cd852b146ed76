from hypothesis import given, strategies as st

from agcheck.actions import Copy, Eval, Loop, Propagate, iter_statements, parse_action
from agcheck.oracle import enumerate_trees
from agcheck.synth import GenConfig, random_bundle, random_bundle_doc, stress_bundle


@given(st.integers(0, 100_000))
def test_random_bundles_are_valid_and_bounded(seed):
    doc = random_bundle_doc(seed)
    assert len(doc["modules"][0]["productions"]) <= GenConfig().max_productions
    g = random_bundle(seed)
    assert enumerate_trees(g, 1)
    for p in g.productions:
        ast = parse_action(p.action("r"), owner=p)
        for _, s in iter_statements(ast):
            assert not isinstance(s, (Copy, Propagate))
            assert getattr(s, "n", "a") in ("a", "b", "c")


@given(st.integers(0, 100_000))
def test_no_eval_inside_loops(seed):
    g = random_bundle(seed)
    for p in g.productions:
        for path, s in iter_statements(parse_action(p.action("r"))):
            if isinstance(s, Loop):
                assert not any(isinstance(x, Eval) for _, x in iter_statements(s.body))


def test_generation_is_deterministic():
    assert random_bundle_doc(7) == random_bundle_doc(7)
    assert random_bundle_doc(7) != random_bundle_doc(8)


def test_stress_bundle_shape():
    g = stress_bundle()
    assert len(g.productions) == 25
    assert {p.lhs for p in g.productions} == {"Program", "A", "B", "C"}
