"""Bounded exploration of a role CFG.

States are ``(node, ctx, tags)``.  An entry edge is not followed when its tag
already occurs twice on the tag stack, and a state already expanded is not
expanded again; together these keep the explored set finite without hiding a
violation (for copy/propagate-free actions).
"""

from __future__ import annotations

import os
import time
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import BudgetExceeded
from .rolecfg import ENTRY, UNTAGGED, RoleCfg
from .semantics import (
    AttrTypeDynamicallyChecked, BadAttrT, ContextStack, MissingAttr, apply_action, ctx_head, merge_head,
)

DEFAULT_MAX_STATES = 5_000_000


def default_budget() -> int:
    value = os.environ.get("AGCHECK_MAX_STATES")
    return int(value) if value else DEFAULT_MAX_STATES


@dataclass(frozen=True)
class Violation:
    kind: object  # MissingAttr | BadAttrT | AttrTypeDynamicallyChecked
    production: str
    local: int  # node id inside the production's action CFG
    node: int  # node id in the role CFG where it was observed
    label: str | None = None
    span: object = None
    witness: tuple = field(default=(), compare=False)

    @property
    def severity(self) -> str:
        return self.kind.severity

    @property
    def key(self):
        """Identity used for deduplication and cross-configuration comparison."""
        return (self.kind, self.production, self.local)

    def to_json(self) -> dict:
        k = self.kind
        out = {
            "kind": type(k).__name__,
            "severity": self.severity,
            "production": self.production,
            "label": self.label,
            "index": k.i,
            "attr": k.n,
        }
        if isinstance(k, BadAttrT):
            out["requiredType"] = k.required
            out["providedType"] = k.provided
        elif isinstance(k, AttrTypeDynamicallyChecked):
            out["requiredType"] = k.t
        out["witness"] = list(self.witness)
        out["span"] = None if self.span is None else str(self.span)
        return out

    def describe(self) -> str:
        k = self.kind
        where = f"{self.production}" + (f" ({self.label})" if self.label else "")
        at = f" at {self.span}" if self.span is not None else ""
        if isinstance(k, MissingAttr):
            what = f"${k.i}.{k.n} read before it is set"
        elif isinstance(k, BadAttrT):
            what = f"${k.i}.{k.n} provided as {k.provided}, not assignable to required {k.required}"
        else:
            what = f"${k.i}.{k.n} dynamically checked against {k.t}"
        return f"{self.severity}: {type(k).__name__} in {where}{at}: {what}"


@dataclass
class VisitStats:
    statesExpanded: int = 0
    statesDeduped: int = 0
    cacheHits: int = 0
    cacheEntries: int = 0
    maxWorklist: int = 0
    elapsed: float = 0.0

    def to_json(self) -> dict:
        return dict(self.__dict__)


class VisitResult(NamedTuple):
    violations: list
    stats: VisitStats
    reached: frozenset = frozenset()
    states: list | None = None

    @property
    def errors(self) -> list:
        return [v for v in self.violations if v.severity == "error"]


class _Collector:
    def __init__(self, cfg: RoleCfg):
        self.cfg = cfg
        self.found: dict = {}

    def add(self, kinds, node, state):
        pid, local = self.cfg.origin[node]
        for kind in kinds:
            key = (kind, pid, local)
            if key in self.found:
                continue
            self.found[key] = Violation(
                kind, pid, local, node, self.cfg.labels.get(pid), self.cfg.spans.get(node), _witness(state)
            )

    def result(self) -> list:
        out = dict(self.found)
        # productions dropped as duplicates report at their own sites
        for alias, (rep, local_map, spans) in self.cfg.aliases.items():
            for (kind, pid, local), v in self.found.items():
                if pid != rep:
                    continue
                a_local = local_map[local]
                key = (kind, alias, a_local)
                if key not in out:
                    out[key] = Violation(kind, alias, a_local, v.node, None, spans.get(a_local), v.witness)
        return sorted(out.values(), key=_sort_key)


def _sort_key(v: Violation):
    return (v.production, v.local, type(v.kind).__name__, repr(v.kind))


def _witness(state) -> tuple:
    nodes = []
    while state is not None:
        nodes.append(state[0])
        state = state[-1]
    return tuple(reversed(nodes))


def traverse_edge(S: tuple, e, cfg: RoleCfg):
    """Tag stack after following ``e``, or None when the edge is blocked."""
    if e in cfg.entry_edges:
        tag = cfg.entry_edges[e]
        if S.count(tag) >= 2:
            return None
        return S + (tag,)
    if e in cfg.exit_edges:
        if S and S[-1] == cfg.exit_edges[e]:
            return S[:-1]
        return None
    return S


def visit(cfg: RoleCfg, budget: int | None = None, order: str = "fifo", initial=None,
          keep_states: bool = False) -> VisitResult:
    """Explore every admitted state of ``cfg`` and collect violations.

    ``initial`` optionally gives ``[(node, ctx, tags)]`` start states instead of
    the role entry with an empty root context.
    """
    budget = default_budget() if budget is None else budget
    t0 = time.perf_counter()
    stats = VisitStats()
    nodes, out_edges, hierarchy = cfg.nodes, cfg.out_edges(), cfg.hierarchy
    collector = _Collector(cfg)
    if initial is None:
        initial = [(cfg.entry, ContextStack.root(), ())]
    work = deque((n, c, t, None) for n, c, t in initial)
    pop = work.popleft if order == "fifo" else work.pop
    push = work.append
    visited = set()
    while work:
        if len(work) > stats.maxWorklist:
            stats.maxWorklist = len(work)
        st = pop()
        node, ctx, tags, _ = st
        key = (node, ctx, tags)
        if key in visited:
            stats.statesDeduped += 1
            continue
        visited.add(key)
        stats.statesExpanded += 1
        if stats.statesExpanded > budget:
            stats.elapsed = time.perf_counter() - t0
            raise BudgetExceeded(f"visit exceeded {budget} expanded states", stats)
        ctx2, found = apply_action(ctx, nodes[node], hierarchy)
        if found:
            collector.add(found, node, st)
        for target, kind, tag in out_edges[node]:
            if kind == UNTAGGED:
                t2 = tags
            elif kind == ENTRY:
                if tags.count(tag) >= 2:
                    continue
                t2 = tags + (tag,)
            else:
                if not tags or tags[-1] != tag:
                    continue
                t2 = tags[:-1]
            if (target, ctx2, t2) in visited:
                stats.statesDeduped += 1
                continue
            push((target, ctx2, t2, st))
    stats.elapsed = time.perf_counter() - t0
    reached = frozenset(k[0] for k in visited)
    return VisitResult(collector.result(), stats, reached, list(visited) if keep_states else None)


class _Summary:
    __slots__ = ("exit_anchor", "outputs", "pending")

    def __init__(self, exit_anchor):
        self.exit_anchor = exit_anchor
        self.outputs: dict = {}  # ordered set of exit heads
        self.pending: list = []  # (ctx after EnterCtx, tags, head stack, call-site state)


def visit_optimized(cfg: RoleCfg, budget: int | None = None, order: str = "fifo") -> VisitResult:
    """Visit with per-nonterminal summaries keyed by (entry anchor, entry head).

    The first arrival at an entry anchor with a given head explores the callee
    productions.  Every later arrival with the same head jumps straight to the
    exit anchor once per exit head recorded so far, and is remembered so that
    exit heads discovered later are replayed onto it.
    """
    if cfg.anchors is None:
        raise ValueError("visit_optimized needs a role CFG built with anchors")
    budget = default_budget() if budget is None else budget
    t0 = time.perf_counter()
    stats = VisitStats()
    nodes, out_edges, hierarchy = cfg.nodes, cfg.out_edges(), cfg.hierarchy
    entry_anchor = {a_in: a_out for a_in, a_out in cfg.anchors.values()}
    exit_anchor = set(entry_anchor.values())
    collector = _Collector(cfg)
    cache: dict = {}
    # state: (node, ctx, tags, head stack, parent)
    work = deque([(cfg.entry, ContextStack.root(), (), (), None)])
    pop = work.popleft if order == "fifo" else work.pop
    push = work.append
    visited = set()
    while work:
        if len(work) > stats.maxWorklist:
            stats.maxWorklist = len(work)
        st = pop()
        node, ctx, tags, hs, _ = st
        key = (node, ctx, tags, hs)
        if key in visited:
            stats.statesDeduped += 1
            continue
        visited.add(key)
        stats.statesExpanded += 1
        if stats.statesExpanded > budget:
            stats.elapsed = time.perf_counter() - t0
            raise BudgetExceeded(f"optimized visit exceeded {budget} expanded states", stats)
        ctx2, found = apply_action(ctx, nodes[node], hierarchy)
        if found:
            collector.add(found, node, st)
        if node in exit_anchor:
            summ = cache[hs[-1]]
            h_out = ctx_head(ctx2)
            if h_out not in summ.outputs:
                summ.outputs[h_out] = None
                for p_ctx, p_tags, p_hs, p_state in summ.pending:
                    push((node, merge_head(p_ctx, h_out), p_tags, p_hs + (hs[-1],), p_state))
        for target, kind, tag in out_edges[node]:
            hs2 = hs
            if kind == UNTAGGED:
                t2 = tags
            elif kind == ENTRY:
                if tags.count(tag) >= 2:
                    continue
                t2 = tags + (tag,)
                if target in entry_anchor:
                    ckey = (target, ctx_head(ctx2))
                    summ = cache.get(ckey)
                    if summ is not None:
                        stats.cacheHits += 1
                        summ.pending.append((ctx2, t2, hs, st))
                        for h_out in list(summ.outputs):
                            push((summ.exit_anchor, merge_head(ctx2, h_out), t2, hs + (ckey,), st))
                        continue
                    cache[ckey] = _Summary(entry_anchor[target])
                    stats.cacheEntries += 1
                    hs2 = hs + (ckey,)
            else:
                if not tags or tags[-1] != tag:
                    continue
                t2 = tags[:-1]
                if node in exit_anchor:
                    hs2 = hs[:-1]
            if (target, ctx2, t2, hs2) in visited:
                stats.statesDeduped += 1
                continue
            push((target, ctx2, t2, hs2, st))
    stats.elapsed = time.perf_counter() - t0
    reached = frozenset(k[0] for k in visited)
    return VisitResult(collector.result(), stats, reached)
