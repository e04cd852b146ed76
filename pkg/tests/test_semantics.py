import pytest
from hypothesis import given, settings, strategies as st

from agcheck.actions import CopyAttr, EnterCtx, LeaveCtx, Nop, ReadAttr, WriteAttr
from agcheck.errors import ImbalanceError
from agcheck.semantics import (
    AttrMap, AttrTypeDynamicallyChecked, BadAttrT, ContextStack, MissingAttr, apply_action, ctx_get, ctx_get_all,
    ctx_head, ctx_put, ctx_put_all, eval_path, is_balanced_actions, is_balanced_prefix, merge_head,
    path_violations, top_k,
)

from walks import HIER, WALK_SEEDS, attr_maps, balanced_prefixes, fake_cfg, plain_actions, random_walk, stacks, walk_cfg


def two_deep(root, child, k=1):
    return ContextStack.of([(0, root), (k, child)])


# ----------------------------------------------------------------- examples


def test_get_on_root_and_child():
    root = ContextStack.root({(1, "v"): "Int"})
    assert ctx_get(root, 1, "v") == "Int"
    assert ctx_get(root, 2, "v") is None
    C = two_deep({(1, "v"): "Int"}, {(2, "w"): "Str"})
    assert ctx_get(C, 0, "v") == "Int"
    assert ctx_get(C, 2, "w") == "Str"
    assert ctx_get(C, 1, "v") is None


def test_put_targets_parent_for_self():
    C = two_deep({}, {}, k=2)
    D = ctx_put(C, 0, "v", "Int")
    assert D.below.m == {(2, "v"): "Int"} and D.m == {}
    E = ctx_put(C, 1, "w", "Str")
    assert E.m == {(1, "w"): "Str"} and E.below.m == {}
    # overwrite keeps the last type
    assert ctx_get(ctx_put(D, 0, "v", "Str"), 0, "v") == "Str"


@given(stacks(), st.integers(0, 2), st.sampled_from("abc"), st.sampled_from(["Int", "Str"]))
def test_get_after_put(C, i, n, t):
    assert ctx_get(ctx_put(C, i, n, t), i, n) == t


def test_get_all_and_put_all():
    root = ContextStack.root({(1, "a"): "Int", (1, "b"): "Str", (2, "a"): "Int"})
    assert ctx_get_all(root, 1) == {("a", "Int"), ("b", "Str")}
    assert ctx_get_all(ContextStack.root(), 1) == frozenset()
    C = ctx_put_all(ContextStack.root({(1, "v"): "Int"}), 1, {("v", "Str"), ("w", "Env")})
    assert C.m == {(1, "v"): "Int", (1, "w"): "Env"}


@given(stacks(), st.integers(0, 2))
def test_get_all_matches_get(C, i):
    for n, t in ctx_get_all(C, i):
        assert ctx_get(C, i, n) == t
    assert ctx_put_all(C, i, ctx_get_all(C, i)) == C


def test_head_examples():
    assert ctx_head(ContextStack.root({(1, "x"): "Int"})) == {(1, "x"): "Int"}
    C = two_deep({(2, "p"): "Int"}, {(1, "q"): "Str"}, k=2)
    assert ctx_head(C) == {(0, "p"): "Int", (1, "q"): "Str"}


def test_apply_action_cases():
    root = ContextStack.root()
    assert apply_action(root, ReadAttr(1, "v", "Int"), HIER) == (root, {MissingAttr(1, "v")})
    C = ContextStack.root({(1, "v"): "Str"})
    assert apply_action(C, ReadAttr(1, "v", "Int"), HIER)[1] == {BadAttrT(1, "v", "Int", "Str")}
    C = ContextStack.root({(1, "v"): "PosInt"})
    assert apply_action(C, ReadAttr(1, "v", "Int"), HIER)[1] == frozenset()
    assert apply_action(C, Nop(), HIER) == (C, frozenset())
    D, found = apply_action(C, CopyAttr(1, "w", 1, "v"), HIER)
    assert not found and ctx_get(D, 1, "w") == "PosInt"
    assert apply_action(root, CopyAttr(1, "w", 1, "v"), HIER)[1] == {MissingAttr(1, "v")}
    from agcheck.actions import CheckAttrType, PropagateAttrs
    assert apply_action(root, CheckAttrType(1, "v", "Int"), HIER)[1] == {AttrTypeDynamicallyChecked(1, "v", "Int")}
    P = two_deep({(1, "v"): "Env"}, {(1, "v"): "Int", (1, "u"): "Str"})
    Q, _ = apply_action(P, PropagateAttrs(), HIER)
    # the existing $0.v survives, $0.u is added
    assert ctx_get(Q, 0, "v") == "Env" and ctx_get(Q, 0, "u") == "Str"
    pushed, _ = apply_action(root, EnterCtx(2), HIER)
    assert len(pushed) == 2 and pushed.k == 2
    assert apply_action(pushed, LeaveCtx(), HIER)[0] == root
    with pytest.raises(ImbalanceError):
        apply_action(root, LeaveCtx(), HIER)


def test_path_helpers():
    cfg = fake_cfg([WriteAttr(1, "v", "Int"), ReadAttr(1, "v", "Int"), ReadAttr(1, "w", "Int"), Nop()])
    C = ContextStack.root()
    assert eval_path([], C, cfg) == C
    assert path_violations([0, 1], C, cfg) == frozenset()
    assert path_violations([0, 2], C, cfg) == {MissingAttr(1, "w")}
    # only the last node's violations count
    assert path_violations([2, 3], C, cfg) == frozenset()


def test_balanced_prefix_examples():
    cfg = fake_cfg([EnterCtx(1), WriteAttr(0, "v", "Int"), LeaveCtx()])
    assert is_balanced_prefix([], cfg)
    assert is_balanced_prefix([0, 1, 2], cfg)
    assert is_balanced_prefix([0, 0, 2], cfg)
    assert not is_balanced_prefix([2], cfg)
    assert not is_balanced_prefix([0, 2, 2], cfg)


def test_top_k():
    C = ContextStack.of([(0, {}), (1, {(1, "a"): "Int"}), (2, {})])
    assert [c.k for c in top_k(C, 2)] == [1, 2]
    with pytest.raises(ValueError):
        top_k(C, 4)


def test_merge_head_examples():
    C = two_deep({}, {})
    D = merge_head(C, AttrMap({(0, "v"): "Int"}))
    assert D.below.m == {(1, "v"): "Int"} and D.m == {}
    root = ContextStack.root({(1, "x"): "Int"})
    assert merge_head(root, AttrMap({(2, "y"): "Str"})).m == {(2, "y"): "Str"}


# --------------------------------------------------------------- properties


@settings(max_examples=1000)
@given(st.integers(0, WALK_SEEDS - 1), st.randoms(use_true_random=False), stacks(), st.data())
def test_eval_path_is_piecewise(seed, rnd, C, data):
    """Evaluating a valid path in two pieces equals evaluating it at once."""
    cfg = walk_cfg(seed)
    path, _ = random_walk(cfg, rnd)
    cut = data.draw(st.integers(0, len(path)))
    whole = eval_path(path, C, cfg)
    assert eval_path(path[cut:], eval_path(path[:cut], C, cfg), cfg) == whole


@given(attr_maps(), attr_maps(min_index=1), st.integers(1, 2), stacks(max_depth=3), stacks(max_depth=3))
def test_head_depends_on_top_two_items(parent, top, k, low1, low2):
    def build(low):
        return ContextStack(ContextStack(low, 1, parent), k, top)

    C1, C2 = build(low1), build(low2)
    assert ctx_head(C1) == ctx_head(C2)


@given(stacks(), stacks(), plain_actions(copies=True))
def test_action_errors_depend_on_head_only(C1, other, a):
    C2 = merge_head(other, ctx_head(C1))
    assert ctx_head(C2) == ctx_head(C1)
    assert apply_action(C1, a, HIER)[1] == apply_action(C2, a, HIER)[1]


@given(stacks(), attr_maps())
def test_merge_head_sets_head(C, h):
    if len(C) == 1:
        assert ctx_head(merge_head(C, h)) == h
    else:
        assert ctx_head(merge_head(C, h)) == h
        # entries below the top two are untouched
        assert merge_head(C, h).below.below == C.below.below


@given(stacks())
def test_merge_head_fixpoint(C):
    assert merge_head(C, ctx_head(C)) == C


@st.composite
def stacks_sharing_top(draw):
    k = draw(st.integers(1, 3))
    shared = [(draw(st.integers(1, 2)), draw(attr_maps(min_index=1))) for _ in range(k)]

    def build():
        low = draw(stacks(max_depth=2))
        for kk, m in shared:
            low = ContextStack(low, kk, m)
        return low

    return k, build(), build()


@given(stacks_sharing_top(), balanced_prefixes())
def test_balanced_prefix_preserves_top_k(triple, actions):
    k, C1, C2 = triple
    assert top_k(C1, k) == top_k(C2, k)
    cfg = fake_cfg(actions)
    path = list(range(len(actions)))
    assert top_k(eval_path(path, C1, cfg), k) == top_k(eval_path(path, C2, cfg), k)


@given(stacks(), stacks(), balanced_prefixes())
def test_balanced_prefix_preserves_equal_heads(C1, other, actions):
    C2 = merge_head(other, ctx_head(C1))
    cfg = fake_cfg(actions)
    path = list(range(len(actions)))
    D1, D2 = eval_path(path, C1, cfg), eval_path(path, C2, cfg)
    assert ctx_head(D1) == ctx_head(D2)
    if actions:
        assert path_violations(path, C1, cfg) == path_violations(path, C2, cfg)


@pytest.mark.parametrize("opt2", [False, True])
@given(st.integers(0, WALK_SEEDS - 1), st.randoms(use_true_random=False))
def test_random_walks_stay_parenthesised(opt2, seed, rnd):
    """Following admitted edges never pops an unopened context nor holds a tag three times."""
    cfg = walk_cfg(seed, opt2=opt2)
    path, tag_trace = random_walk(cfg, rnd, max_len=80)
    assert is_balanced_prefix(path, cfg)
    eval_path(path, ContextStack.root(), cfg)
    for tags in tag_trace:
        assert all(tags.count(t) <= 2 for t in tags)
    # open contexts match open tags, except a trailing EnterCtx whose tagged edge is not yet taken
    depth = sum(isinstance(cfg.nodes[v], EnterCtx) for v in path) - sum(isinstance(cfg.nodes[v], LeaveCtx) for v in path)
    assert depth == len(tag_trace[-1]) + isinstance(cfg.nodes[path[-1]], EnterCtx)


def test_is_balanced_actions_on_sequences():
    assert is_balanced_actions([])
    assert is_balanced_actions([EnterCtx(1), EnterCtx(1)])
    assert not is_balanced_actions([EnterCtx(1), LeaveCtx(), LeaveCtx()])
