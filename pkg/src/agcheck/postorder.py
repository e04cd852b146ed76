"""Signature-based checker for postorder roles.

Each production is reduced to what it provides on ``$0`` and what it requires
from its children, by a purely syntactic scan.  A consumer is accepted when
every producer of each child nonterminal provides every required attribute
with a compatible type.  The scan ignores control flow on purpose: a write
hidden behind a branch counts as provided, which is exactly the weakness the
CFG visit removes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .actions import Copy, Propagate, Read, Write, iter_statements
from .analysis import role_asts
from .model import TOP, Bundle, producers

log = logging.getLogger(__name__)

UNTYPED = None  # provided through a copy; the type is only known at run time


@dataclass
class AttributeSignature:
    production: str
    provided: dict = field(default_factory=dict)  # name -> type (or UNTYPED)
    required: dict = field(default_factory=dict)  # (index, name) -> type
    provides_any: bool = False  # a propagate forwards whatever the child has
    warnings: list = field(default_factory=list)


def extract_signature(ast, p, hierarchy=None) -> AttributeSignature:
    sig = AttributeSignature(p.id)
    for _, s in iter_statements(ast):
        if isinstance(s, Write) and s.i == 0:
            old = sig.provided.get(s.n)
            if old is not None and old != s.t:
                sig.warnings.append(f"{p.id}: $0.{s.n} written as both {old} and {s.t}; keeping {s.t}")
            sig.provided[s.n] = s.t
        elif isinstance(s, Read) and s.i >= 1:
            old = sig.required.get((s.i, s.n))
            if old is None or (hierarchy is not None and old != s.t and hierarchy.subtype_of(s.t, old)):
                sig.required[(s.i, s.n)] = s.t
        elif isinstance(s, Copy):
            if s.i_s >= 1:
                sig.required.setdefault((s.i_s, s.n_s), TOP)
            if s.i_d == 0:
                sig.provided.setdefault(s.n_d, UNTYPED)
        elif isinstance(s, Propagate):
            sig.provides_any = True
        # reads of $0 and writes to children are ignored: in postorder nothing
        # has run on the parent side yet
    for w in sig.warnings:
        log.debug("%s", w)
    return sig


@dataclass(frozen=True)
class PostorderDiagnostic:
    kind: str  # "postorder-missing" | "postorder-incompatible"
    production: str
    provider: str
    index: int
    attr: str
    required: str
    provided: str | None = None
    label: str | None = None

    severity = "error"

    @property
    def message(self) -> str:
        if self.kind == "postorder-missing":
            return f"{self.provider} does not provide {self.attr} required by {self.production}[{self.index}]"
        return (f"type of provided {self.provider}[0].{self.attr} is incompatible with "
                f"{self.production}[{self.index}].{self.attr}")

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "severity": self.severity,
            "production": self.production,
            "label": self.label,
            "index": self.index,
            "attr": self.attr,
            "requiredType": self.required,
        }
        if self.provided is not None:
            out["providedType"] = self.provided
        out.update(witness=[], span=None, provider=self.provider, message=self.message)
        return out


def verify_postorder(g: Bundle, sigs) -> list[PostorderDiagnostic]:
    by_id = {s.production: s for s in (sigs.values() if isinstance(sigs, dict) else sigs)}
    out = []
    for p in g.productions:
        sig = by_id.get(p.id)
        if sig is None:
            continue
        for (i, a), t_req in sorted(sig.required.items()):
            for q in producers(g, p.symbol(i)):
                qs = by_id.get(q.id)
                if qs is None or qs.provides_any:
                    continue
                if a not in qs.provided:
                    out.append(PostorderDiagnostic("postorder-missing", p.id, q.id, i, a, t_req, label=p.label))
                    continue
                t_prov = qs.provided[a]
                if t_prov is not UNTYPED and not g.hierarchy.subtype_of(t_prov, t_req):
                    out.append(PostorderDiagnostic("postorder-incompatible", p.id, q.id, i, a, t_req, t_prov, p.label))
    return out


def check_postorder(g: Bundle, role_name: str, asts=None) -> list[PostorderDiagnostic]:
    """Extract signatures for ``role_name`` and verify them."""
    if asts is None:
        asts = role_asts(g, role_name)
    sigs = [extract_signature(asts[p.id], p, g.hierarchy) for p in g.productions]
    return verify_postorder(g, sigs)
