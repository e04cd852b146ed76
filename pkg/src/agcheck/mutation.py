"""Attribute-rename mutation campaigns.

Every identifier occurrence in a role's actions is renamed, one at a time, to
a name used nowhere in the bundle.  Each mutant is checked by the CFG visit,
by the postorder checker (the baseline) and optionally by the oracle.  Mutants
the visit lets through are sorted into the benign survivor categories.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .actions import (
    Check, Copy, CopyAttr, Read, ReadAttr, Write, attr_names, iter_statements, parse_action,
    replace_statement, unparse,
)
from .analysis import analyze_role, build_for_role
from .errors import BaselineDirty
from .model import Bundle, Module
from .oracle import error_keys, oracle_check
from .postorder import check_postorder
from .visit import visit

CATEGORIES = ("read-without-write", "unnecessary-copy", "dead-code", "other")


@dataclass(frozen=True)
class MutationSite:
    module: str
    production: str
    role: str
    path: tuple
    occurrence: str  # write-name | read-name | copy-source | copy-dest | check-name
    original: str
    fresh: str = ""

    def describe(self) -> str:
        where = ".".join(map(str, self.path))
        return f"{self.production}@{where} {self.occurrence} {self.original}->{self.fresh}"

    def to_json(self) -> dict:
        return {
            "module": self.module, "production": self.production, "role": self.role, "path": list(self.path),
            "occurrence": self.occurrence, "original": self.original, "fresh": self.fresh,
        }


def _bundle_names(b: Bundle) -> set:
    names = set()
    for p in b.productions:
        for src in p.actions.values():
            names |= attr_names(parse_action(src))
    return names


def _occurrences(stmt):
    if isinstance(stmt, Write):
        return [("write-name", stmt.n)]
    if isinstance(stmt, Read):
        return [("read-name", stmt.n)]
    if isinstance(stmt, Copy):
        return [("copy-source", stmt.n_s), ("copy-dest", stmt.n_d)]
    if isinstance(stmt, Check):
        return [("check-name", stmt.n)]
    return []


def _renamed(stmt, occurrence, fresh):
    if occurrence == "copy-source":
        return replace(stmt, n_s=fresh)
    if occurrence == "copy-dest":
        return replace(stmt, n_d=fresh)
    return replace(stmt, n=fresh)


def _with_action(b: Bundle, pid: str, role: str, source: str) -> Bundle:
    modules = []
    for m in b.modules:
        prods = tuple(
            replace(p, actions={**p.actions, role: source}) if p.id == pid else p for p in m.productions
        )
        modules.append(Module(m.name, prods))
    return Bundle(b.hierarchy, b.nonterminals, b.roles, tuple(modules), b.start)


def enumerate_mutants(b: Bundle, role: str) -> list[tuple[MutationSite, Bundle]]:
    """One mutant per identifier occurrence, in declaration and source order."""
    b.role(role)
    used = _bundle_names(b)
    out, counter = [], 0
    for m in b.modules:
        for p in m.productions:
            ast = parse_action(p.action(role), owner=p, hierarchy=b.hierarchy)
            for path, stmt in iter_statements(ast):
                for occurrence, name in _occurrences(stmt):
                    fresh = f"{name}_m{counter}"
                    while fresh in used:
                        counter += 1
                        fresh = f"{name}_m{counter}"
                    counter += 1
                    mutated = replace_statement(ast, path, _renamed(stmt, occurrence, fresh))
                    site = MutationSite(m.name, p.id, role, path, occurrence, name, fresh)
                    out.append((site, _with_action(b, p.id, role, unparse(mutated))))
    return out


# --------------------------------------------------------------------------
# survivor classification


@dataclass
class BaselineArtifacts:
    """Unoptimised role CFG of the unmutated bundle plus every state it admits."""

    bundle: Bundle
    role: str
    cfg: object
    asts: dict
    raw_asts: dict
    reached: frozenset
    states_at: dict  # node -> [(node, ctx, tags)]
    budget: int | None = None

    @classmethod
    def build(cls, b: Bundle, role: str, budget=None) -> "BaselineArtifacts":
        cfg, asts = build_for_role(b, role, opt1=False, opt2=False)
        res = visit(cfg, budget, keep_states=True)
        states_at: dict = {}
        for st in res.states:
            states_at.setdefault(st[0], []).append(st)
        raw = {p.id: parse_action(p.action(role), owner=p, hierarchy=b.hierarchy) for p in b.productions}
        return cls(b, role, cfg, asts, raw, res.reached, states_at, budget)

    def nodes_of(self, site: MutationSite) -> list[int]:
        """Role-CFG nodes lowered from the mutated statement."""
        path = site.path
        # the postorder sugar prepends evals of every child
        if self.asts[site.production] != self.raw_asts[site.production]:
            p = self.bundle.production(site.production)
            if self.bundle.role(self.role).mode == "postorder":
                path = (path[0] + p.arity,) + path[1:]
        return [
            n for n, (pid, _) in self.cfg.origin.items()
            if pid == site.production and self.cfg.paths.get(n) == path
        ]


def _reads_name(a, name) -> bool:
    return (isinstance(a, ReadAttr) and a.n == name) or (isinstance(a, CopyAttr) and a.n_s == name)


def classify_survivor(site: MutationSite, mutant: Bundle, art: BaselineArtifacts) -> str:
    nodes = art.nodes_of(site)
    if not any(n in art.reached for n in nodes):
        return "dead-code"
    if site.occurrence == "write-name":
        starts = [st for n in nodes for st in art.states_at.get(n, ())]
        after = visit(art.cfg, art.budget, initial=starts)
        if not any(_reads_name(art.cfg.nodes[n], site.original) for n in after.reached if n not in nodes):
            return "read-without-write"
    if site.occurrence in ("copy-source", "copy-dest") and art.bundle.production(site.production).arity == 1:
        return "unnecessary-copy"
    return "other"


# --------------------------------------------------------------------------
# campaign


@dataclass
class MutantOutcome:
    site: MutationSite
    detected: bool
    baseline: bool
    warnings_only: bool = False
    oracle_faulty: bool | None = None
    category: str | None = None
    errors: list = field(default_factory=list)


@dataclass
class CampaignReport:
    language: str
    role: str
    generated: int = 0
    detectedStatic: int = 0
    detectedBaseline: int = 0
    oracleFaulty: int | None = None
    missed: list = field(default_factory=list)  # oracle-faulty mutants the visit did not flag
    survivors: list = field(default_factory=list)  # (site, category)
    checkMutants: list = field(default_factory=list)  # check-name sites, reported apart
    elapsed: float = 0.0
    outcomes: list = field(default_factory=list)

    @property
    def ratioStatic(self) -> float:
        return self.detectedStatic / self.generated if self.generated else 0.0

    @property
    def ratioBaseline(self) -> float:
        return self.detectedBaseline / self.generated if self.generated else 0.0

    def to_json(self) -> dict:
        return {
            "language": self.language,
            "role": self.role,
            "generated": self.generated,
            "detectedBaseline": self.detectedBaseline,
            "ratioBaseline": round(self.ratioBaseline, 4),
            "detectedStatic": self.detectedStatic,
            "ratioStatic": round(self.ratioStatic, 4),
            "oracleFaulty": self.oracleFaulty,
            "missed": [s.to_json() for s in self.missed],
            "survivors": [dict(s.to_json(), category=c) for s, c in self.survivors],
            "checkMutants": [s.to_json() for s in self.checkMutants],
            "elapsed": round(self.elapsed, 3),
        }


def _diag_keys(diags) -> set:
    return {(d.kind, d.production, d.provider, d.index, d.attr) for d in diags}


def _check_mutant(args):
    site, mutant, role, budget, use_oracle, bound, base_post, base_oracle = args
    res = analyze_role(mutant, role, budget=budget)
    errors = res.errors
    post = _diag_keys(check_postorder(mutant, role))
    out = MutantOutcome(site, bool(errors), bool(post - base_post), errors=[v.describe() for v in errors])
    out.warnings_only = site.occurrence == "check-name"
    if use_oracle:
        out.oracle_faulty = bool(error_keys(oracle_check(mutant, role, bound)) - base_oracle)
    return out


def run_campaign(b: Bundle, role: str, use_oracle: bool = False, budget: int | None = None, jobs: int = 1,
                 bound: int = 2, language: str | None = None) -> CampaignReport:
    t0 = time.perf_counter()
    base = analyze_role(b, role, budget=budget)
    if base.errors:
        raise BaselineDirty(f"unmutated bundle already has {len(base.errors)} error(s)", base.errors)
    base_post = _diag_keys(check_postorder(b, role))
    base_oracle = error_keys(oracle_check(b, role, bound)) if use_oracle else set()
    mutants = enumerate_mutants(b, role)
    jobs_args = [(s, m, role, budget, use_oracle, bound, base_post, base_oracle) for s, m in mutants]
    if jobs > 1 and len(jobs_args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_check_mutant, jobs_args))
    else:
        outcomes = [_check_mutant(a) for a in jobs_args]
    report = CampaignReport(language or "bundle", role)
    art = None
    for (site, mutant), out in zip(mutants, outcomes):
        if out.warnings_only:
            report.checkMutants.append(site)
            report.outcomes.append(out)
            continue
        report.generated += 1
        report.detectedStatic += out.detected
        report.detectedBaseline += out.baseline
        if use_oracle:
            report.oracleFaulty = (report.oracleFaulty or 0) + out.oracle_faulty
            if out.oracle_faulty and not out.detected:
                report.missed.append(site)
        if not out.detected:
            if art is None:
                art = BaselineArtifacts.build(b, role, budget)
            out.category = classify_survivor(site, mutant, art)
            report.survivors.append((site, out.category))
        report.outcomes.append(out)
    report.elapsed = time.perf_counter() - t0
    return report


def render_table(reports) -> str:
    header = ["Language", "Generated", "Detected w/o", "Ratio", "Detected with", "Ratio", "Total time"]
    rows = []
    for r in reports:
        rows.append([
            r.language, str(r.generated), str(r.detectedBaseline), f"{100 * r.ratioBaseline:.0f}%",
            str(r.detectedStatic), f"{100 * r.ratioStatic:.0f}%", f"{r.elapsed:.2f}s",
        ])
    if len(reports) > 1:
        gen = sum(r.generated for r in reports)
        base = sum(r.detectedBaseline for r in reports)
        stat = sum(r.detectedStatic for r in reports)
        rows.append([
            "Total", str(gen), str(base), f"{100 * base / gen if gen else 0:.0f}%", str(stat),
            f"{100 * stat / gen if gen else 0:.0f}%", f"{sum(r.elapsed for r in reports):.2f}s",
        ])
    widths = [max(len(x) for x in col) for col in zip(header, *rows)]
    fmt = lambda cells: "  ".join(c.ljust(w) if k == 0 else c.rjust(w) for k, (c, w) in enumerate(zip(cells, widths)))
    lines = [fmt(header), "  ".join("-" * w for w in widths)] + [fmt(r) for r in rows]
    return "\n".join(lines)


def render_survivors(report: CampaignReport) -> str:
    lines = [f"  {site.describe()}: {cat}" for site, cat in report.survivors]
    lines += [f"  {site.describe()}: warning only" for site in report.checkMutants]
    return "\n".join(lines)


def report_json(reports) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2)
