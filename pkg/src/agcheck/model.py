"""Type universe, grammar and the JSON bundle format fragments are loaded from."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import ParseError, UnknownType, ValidationError

log = logging.getLogger(__name__)

TOP = "Object"
MODES = ("manual", "postorder", "preorder")


@dataclass(frozen=True)
class TypeHierarchy:
    """Nominal types ordered by declared parents; multiple parents are allowed."""

    parents: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        if TOP not in self.parents:
            raise ValidationError(f"missing top type {TOP!r}")
        if self.parents[TOP]:
            raise ValidationError(f"top type {TOP!r} cannot have parents")
        for name, ps in self.parents.items():
            if not name:
                raise ValidationError("empty type name")
            for p in ps:
                if p not in self.parents:
                    raise ValidationError(f"type {name!r} has undeclared parent {p!r}")
        # Every type must reach the top without revisiting itself.
        state: dict[str, int] = {}

        def walk(t, trail):
            if state.get(t) == 2:
                return
            if state.get(t) == 1:
                raise ValidationError("cyclic type hierarchy: " + " <: ".join(trail + [t]))
            state[t] = 1
            for p in self.parents[t]:
                walk(p, trail + [t])
            state[t] = 2

        for t in self.parents:
            walk(t, [])
        for t in self.parents:
            if TOP not in self.ancestors(t):
                raise ValidationError(f"type {t!r} does not reach {TOP!r}")

    @classmethod
    def from_pairs(cls, decls: Iterable[tuple[str, Iterable[str]]]) -> "TypeHierarchy":
        parents: dict[str, tuple[str, ...]] = {TOP: ()}
        seen = set()
        for name, ps in decls:
            if name in seen:
                raise ValidationError(f"duplicate type {name!r}")
            seen.add(name)
            ps = tuple(ps)
            if name == TOP:
                parents[TOP] = ps
                continue
            parents[name] = ps or (TOP,)
        return cls(parents)

    @property
    def types(self) -> frozenset[str]:
        return frozenset(self.parents)

    def __contains__(self, t) -> bool:
        return t in self.parents

    def ancestors(self, t: str) -> frozenset[str]:
        """Reflexive-transitive closure of the parent relation."""
        cache = self.__dict__.setdefault("_anc", {})
        if t in cache:
            return cache[t]
        if t not in self.parents:
            raise UnknownType(f"unknown type {t!r}")
        out = {t}
        for p in self.parents[t]:
            out |= self.ancestors(p)
        cache[t] = frozenset(out)
        return cache[t]

    def subtype_of(self, t1: str, t2: str) -> bool:
        if t2 not in self.parents:
            raise UnknownType(f"unknown type {t2!r}")
        return t2 in self.ancestors(t1)


def subtype_of(h: TypeHierarchy, t1: str, t2: str) -> bool:
    return h.subtype_of(t1, t2)


@dataclass(frozen=True)
class Production:
    id: str
    lhs: str
    rhs: tuple[str, ...] = ()
    label: str | None = None
    actions: Mapping[str, str] = field(default_factory=dict, hash=False)

    @property
    def arity(self) -> int:
        return len(self.rhs)

    def symbol(self, i: int) -> str:
        """``p[i]``: the left-hand side for 0, otherwise the i-th right-hand symbol."""
        if i == 0:
            return self.lhs
        if 1 <= i <= len(self.rhs):
            return self.rhs[i - 1]
        raise IndexError(f"p[{i}] undefined for {self.id} with |rhs| = {len(self.rhs)}")

    __getitem__ = symbol

    def action(self, role: str) -> str:
        return self.actions.get(role, "")

    def __str__(self):
        return f"{self.lhs} <- {' '.join(self.rhs)}".rstrip()


@dataclass(frozen=True)
class RoleSpec:
    name: str
    mode: str = "manual"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"role {self.name!r}: unknown mode {self.mode!r}")


@dataclass(frozen=True)
class Module:
    name: str
    productions: tuple[Production, ...] = ()


@dataclass(frozen=True, eq=True)
class Bundle:
    hierarchy: TypeHierarchy
    nonterminals: tuple[str, ...]
    roles: tuple[RoleSpec, ...]
    modules: tuple[Module, ...]
    start: str = "Program"

    def __post_init__(self):
        nts = set(self.nonterminals)
        if len(nts) != len(self.nonterminals):
            raise ValidationError("duplicate nonterminal")
        if any(not n for n in self.nonterminals):
            raise ValidationError("empty nonterminal name")
        if self.start not in nts:
            raise ValidationError(f"start symbol {self.start!r} is not a declared nonterminal")
        names = [r.name for r in self.roles]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate role name")
        ids = set()
        for p in self.productions:
            if p.id in ids:
                raise ValidationError(f"duplicate production id {p.id!r}")
            ids.add(p.id)
            for sym in (p.lhs, *p.rhs):
                if sym not in nts:
                    raise ValidationError(f"production {p.id!r} references unknown nonterminal {sym!r}")
            for role in p.actions:
                if role not in names:
                    raise ValidationError(f"production {p.id!r} has an action for unknown role {role!r}")

    @cached_property
    def productions(self) -> tuple[Production, ...]:
        return tuple(p for m in self.modules for p in m.productions)

    @cached_property
    def _by_lhs(self) -> dict[str, tuple[Production, ...]]:
        out: dict[str, list[Production]] = {n: [] for n in self.nonterminals}
        for p in self.productions:
            out[p.lhs].append(p)
        return {k: tuple(v) for k, v in out.items()}

    def production(self, pid: str) -> Production:
        for p in self.productions:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def role(self, name: str) -> RoleSpec:
        for r in self.roles:
            if r.name == name:
                return r
        raise ValidationError(f"unknown role {name!r}")

    def module_of(self, pid: str) -> str:
        for m in self.modules:
            if any(p.id == pid for p in m.productions):
                return m.name
        raise KeyError(pid)

    def unproducible(self) -> list[str]:
        return [n for n in self.nonterminals if not self._by_lhs[n]]


def producers(g: Bundle, nt: str) -> tuple[Production, ...]:
    """Productions with ``nt`` on their left-hand side, in declaration order."""
    if nt not in g._by_lhs:
        raise ValidationError(f"unknown nonterminal {nt!r}")
    return g._by_lhs[nt]


def _require(obj, keys, optional, where):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", where)
    extra = set(obj) - set(keys) - set(optional)
    if extra:
        raise ParseError(f"unknown key(s) {sorted(extra)}", where)
    missing = [k for k in keys if k not in obj]
    if missing:
        raise ParseError(f"missing key(s) {missing}", where)


def _strings(value, where):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError("expected an array of strings", where)
    return value


def bundle_from_dict(doc) -> Bundle:
    _require(doc, ["nonterminals", "modules"], ["types", "start", "roles"], "$")
    decls = []
    for i, t in enumerate(doc.get("types", [])):
        where = f"$.types[{i}]"
        _require(t, ["name"], ["parents"], where)
        if not isinstance(t["name"], str):
            raise ParseError("type name must be a string", where)
        decls.append((t["name"], _strings(t.get("parents", []), where + ".parents")))
    hierarchy = TypeHierarchy.from_pairs(decls)
    roles = []
    for i, r in enumerate(doc.get("roles", [])):
        _require(r, ["name"], ["mode"], f"$.roles[{i}]")
        roles.append(RoleSpec(r["name"], r.get("mode", "manual")))
    modules = []
    for i, m in enumerate(doc["modules"]):
        where = f"$.modules[{i}]"
        _require(m, ["name", "productions"], [], where)
        prods = []
        for j, p in enumerate(m["productions"]):
            pw = f"{where}.productions[{j}]"
            _require(p, ["id", "lhs"], ["label", "rhs", "actions"], pw)
            actions = p.get("actions", {})
            if not isinstance(actions, dict) or not all(isinstance(v, str) for v in actions.values()):
                raise ParseError("actions must map role names to strings", pw)
            prods.append(
                Production(
                    id=str(p["id"]),
                    lhs=p["lhs"],
                    rhs=tuple(_strings(p.get("rhs", []), pw + ".rhs")),
                    label=p.get("label"),
                    actions=dict(actions),
                )
            )
        modules.append(Module(m["name"], tuple(prods)))
    b = Bundle(
        hierarchy=hierarchy,
        nonterminals=tuple(_strings(doc["nonterminals"], "$.nonterminals")),
        roles=tuple(roles),
        modules=tuple(modules),
        start=doc.get("start", "Program"),
    )
    for nt in b.unproducible():
        log.warning("UnproducibleNonterminal: %s has no productions", nt)
    return b


def load_bundle(text: str) -> Bundle:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    return bundle_from_dict(doc)


def bundle_to_dict(b: Bundle) -> dict:
    types = [
        {"name": t, "parents": list(ps)} for t, ps in b.hierarchy.parents.items() if t != TOP
    ]
    modules = []
    for m in b.modules:
        prods = []
        for p in m.productions:
            d = {"id": p.id, "lhs": p.lhs, "rhs": list(p.rhs)}
            if p.label is not None:
                d["label"] = p.label
            d["actions"] = dict(p.actions)
            prods.append(d)
        modules.append({"name": m.name, "productions": prods})
    return {
        "types": types,
        "nonterminals": list(b.nonterminals),
        "start": b.start,
        "roles": [{"name": r.name, "mode": r.mode} for r in b.roles],
        "modules": modules,
    }


def dump_bundle(b: Bundle, indent: int | None = 2) -> str:
    return json.dumps(bundle_to_dict(b), indent=indent)
