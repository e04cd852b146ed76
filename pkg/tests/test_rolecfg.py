from agcheck.actions import EnterCtx, LeaveCtx, lower_to_cfg, parse_action
from agcheck.analysis import build_for_role, role_asts
from agcheck.rolecfg import build_role_cfg, dedup_productions, to_dot
from agcheck.samples import load_sample
from agcheck.synth import stress_bundle

from conftest import make_bundle

TWO_CALLEES = [
    ("program", "Program", ["Expr"], "eval 1; read 1.v : Int;"),
    ("lit", "Expr", [], "write 0.v : Int;"),
    ("neg", "Expr", ["Expr"], "eval 1; copy 0.v = 1.v;"),
]


def test_tags_without_anchors():
    g = make_bundle(TWO_CALLEES)
    cfg, _ = build_for_role(g, "eval", opt1=False, opt2=False)
    # two call sites, two callees each
    assert len(cfg.entry_edges) == 4 and len(cfg.exit_edges) == 4
    assert cfg.tags == set(cfg.exit_edges.values())
    for (u, v), tag in cfg.entry_edges.items():
        assert isinstance(cfg.nodes[u], EnterCtx)
        # the matching exit edge ends at the LeaveCtx behind the same call site
        exits = [e for e, t in cfg.exit_edges.items() if t == tag]
        assert len(exits) == 1
        assert isinstance(cfg.nodes[exits[0][1]], LeaveCtx)
        assert cfg.origin[exits[0][1]][0] == cfg.origin[u][0]
    assert cfg.anchors is None


def test_tags_with_anchors():
    g = make_bundle(TWO_CALLEES)
    cfg, _ = build_for_role(g, "eval", opt1=False, opt2=True)
    a_in, a_out = cfg.anchors["Expr"]
    assert len(cfg.entry_edges) == 2
    assert all(v == a_in for (_, v) in cfg.entry_edges)
    assert all(u == a_out for (u, _) in cfg.exit_edges)
    assert len(cfg.succ[a_in]) == 2
    # anchor edges into the callees are untagged
    assert all(cfg.tag_of((a_in, v)) is None for v in cfg.succ[a_in])


def test_start_productions_wired_to_entry_and_exit():
    g = make_bundle(TWO_CALLEES)
    cfg, _ = build_for_role(g, "eval", opt1=False, opt2=False)
    assert len(cfg.succ[cfg.entry]) == 1
    (first,) = cfg.succ[cfg.entry]
    assert cfg.origin[first][0] == "program"
    assert any(cfg.exit in vs for vs in cfg.succ.values())


def test_dedup_on_stress_bundle():
    g = stress_bundle()
    asts = role_asts(g, "eval")
    cfgs = {pid: lower_to_cfg(a) for pid, a in asts.items()}
    dd = dedup_productions([(p, cfgs[p.id]) for p in g.productions])
    assert len(g.productions) == 25
    assert len(dd.kept) == 16
    assert len(dd.aliases) == 9
    for alias, (rep, local_map, _) in dd.aliases.items():
        assert alias.split("_op")[0] == rep.split("_op")[0]
        assert sorted(local_map) == sorted(cfgs[rep].nodes)
        assert sorted(local_map.values()) == sorted(cfgs[alias].nodes)


def test_dedup_keeps_distinct_shapes():
    g = make_bundle([
        ("program", "Program", ["Expr"], "eval 1;"),
        ("a", "Expr", [], "write 0.v : Int;"),
        ("b", "Expr", [], "write 0.v : Str;"),
        ("c", "Expr", [], "write 0.v : Int;"),
    ])
    asts = role_asts(g, "eval")
    dd = dedup_productions([(p, lower_to_cfg(asts[p.id])) for p in g.productions])
    assert [p.id for p, _ in dd.kept] == ["program", "a", "b"]
    assert dd.aliases["c"][0] == "a"


def test_dot_is_deterministic():
    g = load_sample("expr")
    a, _ = build_for_role(g, "eval")
    b, _ = build_for_role(g, "eval")
    assert to_dot(a) == to_dot(b)
    text = to_dot(a)
    assert text.startswith('digraph "role eval" {')
    assert "anchor Expr" in text and "+t0" in text and "-t0" in text


def test_unproducible_nonterminal_warning():
    g = make_bundle([
        ("program", "Program", ["Expr", "Ghost"], "eval 1; eval 2;"),
        ("lit", "Expr", [], ""),
    ])
    for opt2 in (False, True):
        cfg, _ = build_for_role(g, "eval", opt1=False, opt2=opt2)
        assert any("UnproducibleNonterminal" in w and "Ghost" in w for w in cfg.warnings)
        dead = [n for n, a in cfg.nodes.items() if isinstance(a, EnterCtx) and a.i == 2]
        assert len(dead) == 1 and cfg.succ[dead[0]] == []


def test_build_needs_every_action_cfg():
    import pytest
    from agcheck.errors import MissingActionCfg

    g = make_bundle(TWO_CALLEES)
    cfgs = {"program": lower_to_cfg(parse_action("eval 1;"))}
    with pytest.raises(MissingActionCfg):
        build_role_cfg(g, g.role("eval"), cfgs)
