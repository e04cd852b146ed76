"""Inter-procedural CFG of one role, wired from the per-production action CFGs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .actions import (
    ActionCfg, BeginEvalMetaAction, EnterCtx, LeaveCtx, NOP, action_label, canonical_hash, canonical_order,
)
from .errors import MissingActionCfg
from .model import producers

log = logging.getLogger(__name__)

UNTAGGED, ENTRY, EXIT = 0, 1, 2


@dataclass
class DedupResult:
    kept: list  # [(Production, ActionCfg)]
    # dropped production id -> (representative id, {representative local node: dropped local node})
    aliases: dict = field(default_factory=dict)


def dedup_productions(prods) -> DedupResult:
    """Keep one production per (lhs, rhs, CFG shape) group."""
    groups: dict[tuple, tuple] = {}
    kept, aliases = [], {}
    for p, cfg in prods:
        key = (p.lhs, p.rhs, canonical_hash(cfg))
        if key not in groups:
            groups[key] = (p, cfg, canonical_order(cfg))
            kept.append((p, cfg))
            continue
        rep, rep_cfg, rep_order = groups[key]
        order = canonical_order(cfg)
        aliases[p.id] = (rep.id, dict(zip(rep_order, order)), dict(cfg.spans))
    return DedupResult(kept, aliases)


@dataclass
class RoleCfg:
    role: str
    hierarchy: object
    nodes: dict  # node id -> action
    succ: dict  # node id -> [node id]
    entry: int
    exit: int
    entry_edges: dict = field(default_factory=dict)  # (u, v) -> tag
    exit_edges: dict = field(default_factory=dict)  # (u, v) -> tag
    origin: dict = field(default_factory=dict)  # node id -> (production id, local node id)
    spans: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)  # node id -> statement path in the action AST
    anchors: dict | None = None  # nonterminal -> (entry anchor, exit anchor)
    aliases: dict = field(default_factory=dict)
    production_ids: list = field(default_factory=list)
    labels: dict = field(default_factory=dict)  # production id -> label
    warnings: list = field(default_factory=list)

    @property
    def edges(self) -> set:
        return {(u, v) for u, vs in self.succ.items() for v in vs}

    @property
    def tags(self) -> set:
        return set(self.entry_edges.values())

    def tag_of(self, edge):
        return self.entry_edges.get(edge, self.exit_edges.get(edge))

    def out_edges(self):
        """Per node: list of ``(target, kind, tag)`` with kind UNTAGGED/ENTRY/EXIT."""
        cached = self.__dict__.get("_out")
        if cached is not None:
            return cached
        out = {}
        for u, vs in self.succ.items():
            lst = []
            for v in vs:
                e = (u, v)
                if e in self.entry_edges:
                    lst.append((v, ENTRY, self.entry_edges[e]))
                elif e in self.exit_edges:
                    lst.append((v, EXIT, self.exit_edges[e]))
                else:
                    lst.append((v, UNTAGGED, None))
            out[u] = lst
        self.__dict__["_out"] = out
        return out

    def anchor_nodes(self) -> dict:
        """Anchor node id -> (kind, nonterminal)."""
        out = {}
        for nt, (a_in, a_out) in (self.anchors or {}).items():
            out[a_in] = ("entry", nt)
            out[a_out] = ("exit", nt)
        return out

    def node_count(self) -> int:
        return len(self.nodes)


def build_role_cfg(g, role, cfgs, anchors: bool = False, productions=None, aliases=None) -> RoleCfg:
    """Wire action CFGs into the role CFG.

    ``cfgs`` maps production id to its (mode-applied) action CFG.  Without
    anchors a fresh tag is minted per (call site, callee production); with
    anchors one tag per call site spans call site -> entry anchor and exit
    anchor -> call site, and anchors reach the productions untagged.
    """
    prods = list(g.productions if productions is None else productions)
    included = {p.id for p in prods}
    rc = RoleCfg(
        role=role.name, hierarchy=g.hierarchy, nodes={0: NOP, 1: NOP}, succ={0: [], 1: []}, entry=0, exit=1,
        anchors={} if anchors else None, aliases=dict(aliases or {}),
    )
    bounds, node_range = {}, {}
    for p in prods:
        if p.id not in cfgs:
            raise MissingActionCfg(f"no action CFG for production {p.id!r} in role {role.name!r}")
        cfg: ActionCfg = cfgs[p.id]
        base = len(rc.nodes)
        mapping = {local: base + k for k, local in enumerate(sorted(cfg.nodes))}
        for local, gid in mapping.items():
            rc.nodes[gid] = cfg.nodes[local]
            rc.succ[gid] = [mapping[s] for s in cfg.succ[local]]
            rc.origin[gid] = (p.id, local)
            rc.spans[gid] = cfg.spans.get(local)
            rc.paths[gid] = cfg.paths.get(local)
        bounds[p.id] = (mapping[cfg.entry], mapping[cfg.exit])
        node_range[p.id] = (base, base + len(mapping))
        rc.production_ids.append(p.id)
        rc.labels[p.id] = p.label
        if p.lhs == g.start:
            rc.succ[0].append(mapping[cfg.entry])
            rc.succ[mapping[cfg.exit]].append(1)

    def anchor_pair(nt, callees):
        if nt not in rc.anchors:
            a_in, a_out = len(rc.nodes), len(rc.nodes) + 1
            rc.nodes[a_in] = NOP
            rc.nodes[a_out] = NOP
            rc.succ[a_in], rc.succ[a_out] = [], []
            for q in callees:
                e_in, e_out = bounds[q.id]
                rc.succ[a_in].append(e_in)
                rc.succ[e_out].append(a_out)
            rc.anchors[nt] = (a_in, a_out)
        return rc.anchors[nt]

    next_tag = 0
    for p in prods:
        first, last = node_range[p.id]
        begin_nodes = [gid for gid in range(first, last) if isinstance(rc.nodes[gid], BeginEvalMetaAction)]
        for b in begin_nodes:
            k = rc.nodes[b].i
            (end,) = rc.succ[b]
            rc.succ[b] = []
            nt = p.rhs[k - 1]
            callees = [q for q in producers(g, nt) if q.id in included]
            if not callees:
                rc.warnings.append(f"UnproducibleNonterminal: {p.id} evaluates {nt} which has no productions")
            elif anchors:
                a_in, a_out = anchor_pair(nt, callees)
                rc.succ[b].append(a_in)
                rc.succ[a_out].append(end)
                rc.entry_edges[(b, a_in)] = next_tag
                rc.exit_edges[(a_out, end)] = next_tag
                next_tag += 1
            else:
                for q in callees:
                    e_in, e_out = bounds[q.id]
                    rc.succ[b].append(e_in)
                    rc.succ[e_out].append(end)
                    rc.entry_edges[(b, e_in)] = next_tag
                    rc.exit_edges[(e_out, end)] = next_tag
                    next_tag += 1
            rc.nodes[b] = EnterCtx(k)
            rc.nodes[end] = LeaveCtx()
    return rc


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(cfg: RoleCfg) -> str:
    """Graphviz rendering; output depends only on the graph, never on run order."""
    anchor = cfg.anchor_nodes()
    lines = [f"digraph {_dot_id('role ' + cfg.role)} {{", "  node [shape=box, fontname=monospace];"]
    by_prod: dict[str, list[int]] = {}
    loose = []
    for n in sorted(cfg.nodes):
        if n in cfg.origin:
            by_prod.setdefault(cfg.origin[n][0], []).append(n)
        else:
            loose.append(n)
    for n in loose:
        if n == cfg.entry:
            lines.append(f'  n{n} [label="entry", shape=oval];')
        elif n == cfg.exit:
            lines.append(f'  n{n} [label="exit", shape=oval];')
        else:
            kind, nt = anchor[n]
            lines.append(f"  n{n} [label={_dot_id(f'{kind} anchor {nt}')}, shape=diamond, style=filled];")
    for k, (pid, ns) in enumerate(sorted(by_prod.items())):
        title = pid if not cfg.labels.get(pid) else f"{pid} ({cfg.labels[pid]})"
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f"    label={_dot_id(title)};")
        for n in ns:
            lines.append(f"    n{n} [label={_dot_id(f'{n:x}: ' + action_label(cfg.nodes[n]))}];")
        lines.append("  }")
    for u in sorted(cfg.succ):
        for v in sorted(cfg.succ[u]):
            e = (u, v)
            if e in cfg.entry_edges:
                lines.append(f'  n{u} -> n{v} [label="+t{cfg.entry_edges[e]}", color=blue];')
            elif e in cfg.exit_edges:
                lines.append(f'  n{u} -> n{v} [label="-t{cfg.exit_edges[e]}", color=red];')
            else:
                lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
