"""End-to-end pipeline for one role: parse, lower, wire, visit."""

from __future__ import annotations

from dataclasses import dataclass, field

from .actions import apply_role_mode, lower_to_cfg, parse_action
from .model import Bundle
from .rolecfg import RoleCfg, build_role_cfg, dedup_productions
from .visit import VisitResult, visit, visit_optimized


@dataclass
class RoleAnalysis:
    role: str
    cfg: RoleCfg
    result: VisitResult
    opt1: bool
    opt2: bool
    asts: dict = field(default_factory=dict)  # production id -> mode-applied AST

    @property
    def violations(self):
        return self.result.violations

    @property
    def errors(self):
        return self.result.errors

    @property
    def stats(self):
        return self.result.stats


def role_asts(g: Bundle, role_name: str) -> dict:
    """Parse (and mode-expand) every production's action for ``role_name``."""
    role = g.role(role_name)
    out = {}
    for p in g.productions:
        ast = parse_action(p.action(role.name), owner=p, hierarchy=g.hierarchy)
        out[p.id] = apply_role_mode(ast, role.mode, p)
    return out


def build_for_role(g: Bundle, role_name: str, opt1: bool = True, opt2: bool = True, asts=None):
    role = g.role(role_name)
    asts = role_asts(g, role_name) if asts is None else asts
    cfgs = {pid: lower_to_cfg(ast) for pid, ast in asts.items()}
    prods, aliases = None, None
    if opt1:
        dd = dedup_productions([(p, cfgs[p.id]) for p in g.productions])
        prods = [p for p, _ in dd.kept]
        aliases = dd.aliases
    cfg = build_role_cfg(g, role, cfgs, anchors=opt2, productions=prods, aliases=aliases)
    return cfg, asts


def analyze_role(g: Bundle, role_name: str, opt1: bool = True, opt2: bool = True, budget: int | None = None,
                 order: str = "fifo", asts=None) -> RoleAnalysis:
    cfg, asts = build_for_role(g, role_name, opt1, opt2, asts)
    if opt2:
        result = visit_optimized(cfg, budget, order)
    else:
        result = visit(cfg, budget, order)
    return RoleAnalysis(role_name, cfg, result, opt1, opt2, asts)


def analyze(g: Bundle, roles=None, **kw) -> list[RoleAnalysis]:
    names = [r.name for r in g.roles] if roles is None else list(roles)
    return [analyze_role(g, name, **kw) for name in names]


def violation_keys(violations, errors_only: bool = False) -> set:
    """Comparable ``(kind, site)`` keys, independent of node numbering and witnesses."""
    return {v.key for v in violations if not errors_only or v.severity == "error"}


def fault_keys(violations) -> set:
    """Project error violations to ``(kind name, production, index, attr)``."""
    return {(type(v.kind).__name__, v.production, v.kind.i, v.kind.n) for v in violations if v.severity == "error"}
